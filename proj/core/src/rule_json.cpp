#include "rasm/rule_json.hpp"

#include <stdexcept>

#include "json_detail.hpp"
#include "rasm/graph_json.hpp"

namespace rasm {

using namespace jsondetail;

namespace {

ordered_json rule_to_ojson(const Rule& r) {
    ordered_json out;
    out["name"] = r.name;
    out["O"] = graph_to_ojson(r.o);
    out["K"] = graph_to_ojson(r.k);
    out["I"] = graph_to_ojson(r.i);
    out["ko"] = morphism_to_ojson(r.ko, r.k, r.o);
    out["ki"] = morphism_to_ojson(r.ki, r.k, r.i);
    out["condition"] = condition_to_ojson(r.condition, r.i);
    return out;
}

Rule rule_from_jobj(const json& j, const std::shared_ptr<const TypeGraph>& types,
                    bool allow_weight) {
    if (allow_weight)
        check_keys(j, {"name", "O", "K", "I", "ko", "ki", "condition", "weight"},
                   {"name", "O", "K", "I", "ko", "ki", "condition", "weight"}, "rule");
    else
        check_keys(j, {"name", "O", "K", "I", "ko", "ki", "condition"},
                   {"name", "O", "K", "I", "ko", "ki", "condition"}, "rule");
    std::string name = get_str(j, "name", "rule");
    TypedGraph o = graph_from_jobj(j.at("O"), types);
    TypedGraph k = graph_from_jobj(j.at("K"), types);
    TypedGraph i = graph_from_jobj(j.at("I"), types);
    Morphism ko = morphism_from_jobj(j.at("ko"), k, o);
    Morphism ki = morphism_from_jobj(j.at("ki"), k, i);
    Condition c = condition_from_jobj(j.at("condition"), i, types);
    return Rule(std::move(name), std::move(o), std::move(k), std::move(i), std::move(ko),
                std::move(ki), std::move(c));
}

}  // namespace

std::string rule_to_json(const Rule& r) { return rule_to_ojson(r).dump(2); }

Rule rule_from_json(const std::string& text, std::shared_ptr<const TypeGraph> types) {
    return rule_from_jobj(parse_text(text, "rule"), types, false);
}

std::string rule_set_to_json(const TypeGraph& types, const std::vector<WeightedRule>& rules) {
    ordered_json out;
    out["type_graph"] = json::parse(type_graph_to_json(types));
    out["rules"] = ordered_json::array();
    for (const auto& wr : rules) {
        ordered_json jr = rule_to_ojson(wr.rule);
        jr["weight"] = rat_to_string(wr.weight);
        out["rules"].push_back(std::move(jr));
    }
    return out.dump(2);
}

RuleSetFile rule_set_from_json(const std::string& text) {
    json j = parse_text(text, "rule set");
    check_keys(j, {"type_graph", "rules"}, {"type_graph", "rules"}, "rule set");
    RuleSetFile out;
    out.types = type_graph_from_json(j.at("type_graph").dump());
    if (!j.at("rules").is_array()) throw std::invalid_argument("rule set: rules must be an array");
    for (const auto& jr : j.at("rules")) {
        Rat w = parse_rat(get_str(jr, "weight", "rule"));
        if (!(w > 0)) throw std::invalid_argument("rule set: weight must be positive");
        out.rules.push_back(WeightedRule{std::move(w), rule_from_jobj(jr, out.types, true)});
    }
    return out;
}

}  // namespace rasm
