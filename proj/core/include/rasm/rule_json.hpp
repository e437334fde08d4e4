#ifndef RASM_RULE_JSON_HPP
#define RASM_RULE_JSON_HPP

#include <memory>
#include <string>
#include <vector>

#include "rasm/rule.hpp"
#include "rasm/type_graph.hpp"

namespace rasm {

// rule          {"name":str,"O":graph,"K":graph,"I":graph,
//                "ko":morphism K->O,"ki":morphism K->I,"condition":condition}
// rule set      {"type_graph":type graph,"rules":[rule + "weight":"p/q", ...]}
// Parsers are strict like the graph formats; weights must be positive.

std::string rule_to_json(const Rule& r);
Rule rule_from_json(const std::string& text, std::shared_ptr<const TypeGraph> types);

struct RuleSetFile {
    std::shared_ptr<const TypeGraph> types;
    std::vector<WeightedRule> rules;
};

std::string rule_set_to_json(const TypeGraph& types, const std::vector<WeightedRule>& rules);
RuleSetFile rule_set_from_json(const std::string& text);

}  // namespace rasm

#endif
