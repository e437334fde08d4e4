#ifndef RASM_JSON_DETAIL_HPP
#define RASM_JSON_DETAIL_HPP

// Internal helpers shared by the JSON translation units.  Not installed.

#include <json.hpp>

#include <initializer_list>
#include <memory>
#include <string>

#include "rasm/condition.hpp"
#include "rasm/typed_graph.hpp"

namespace rasm::jsondetail {

using nlohmann::json;
using nlohmann::ordered_json;

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                std::initializer_list<const char*> required, const char* what);
std::string get_str(const json& obj, const char* key, const char* what);
json parse_text(const std::string& text, const char* what);

ordered_json graph_to_ojson(const TypedGraph& g);
TypedGraph graph_from_jobj(const json& j, std::shared_ptr<const TypeGraph> types);
ordered_json morphism_to_ojson(const Morphism& m, const TypedGraph& dom, const TypedGraph& cod);
Morphism morphism_from_jobj(const json& j, const TypedGraph& dom, const TypedGraph& cod);
ordered_json condition_to_ojson(const Condition& c, const TypedGraph& context);
Condition condition_from_jobj(const json& j, const TypedGraph& context,
                              const std::shared_ptr<const TypeGraph>& types);

}  // namespace rasm::jsondetail

#endif
