#include "rasm/graph_json.hpp"

#include "json_detail.hpp"

#include <stdexcept>

namespace rasm::jsondetail {

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                std::initializer_list<const char*> required, const char* what) {
    if (!obj.is_object()) throw std::invalid_argument(std::string(what) + ": expected object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) ok = true;
        if (!ok)
            throw std::invalid_argument(std::string(what) + ": unknown field '" + it.key() + "'");
    }
    for (const char* k : required)
        if (!obj.contains(k))
            throw std::invalid_argument(std::string(what) + ": missing field '" + k + "'");
}

std::string get_str(const json& obj, const char* key, const char* what) {
    const auto& v = obj.at(key);
    if (!v.is_string())
        throw std::invalid_argument(std::string(what) + ": field '" + key + "' must be a string");
    return v.get<std::string>();
}

json parse_text(const std::string& text, const char* what) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw std::invalid_argument(std::string(what) + ": malformed JSON");
    return j;
}

ordered_json graph_to_ojson(const TypedGraph& g) {
    ordered_json out;
    out["vertices"] = ordered_json::array();
    for (int v = 0; v < g.n_vertices(); ++v) {
        ordered_json jv;
        jv["id"] = g.vertex(v).id;
        jv["type"] = g.types().vertex_types[g.vertex(v).type];
        out["vertices"].push_back(std::move(jv));
    }
    out["edges"] = ordered_json::array();
    for (int e = 0; e < g.n_edges(); ++e) {
        ordered_json je;
        je["id"] = g.edge(e).id;
        je["type"] = g.types().edge_types[g.edge(e).type].label;
        je["src"] = g.vertex(g.edge(e).src).id;
        je["tgt"] = g.vertex(g.edge(e).tgt).id;
        out["edges"].push_back(std::move(je));
    }
    return out;
}

TypedGraph graph_from_jobj(const json& j, std::shared_ptr<const TypeGraph> types) {
    check_keys(j, {"vertices", "edges"}, {"vertices", "edges"}, "graph");
    TypedGraph g(std::move(types));
    if (!j.at("vertices").is_array() || !j.at("edges").is_array())
        throw std::invalid_argument("graph: vertices/edges must be arrays");
    for (const auto& jv : j.at("vertices")) {
        check_keys(jv, {"id", "type"}, {"id", "type"}, "vertex");
        g.add_vertex(get_str(jv, "id", "vertex"), get_str(jv, "type", "vertex"));
    }
    for (const auto& je : j.at("edges")) {
        check_keys(je, {"id", "type", "src", "tgt"}, {"id", "type", "src", "tgt"}, "edge");
        g.add_edge(get_str(je, "id", "edge"), get_str(je, "type", "edge"),
                   get_str(je, "src", "edge"), get_str(je, "tgt", "edge"));
    }
    return g;
}

ordered_json morphism_to_ojson(const Morphism& m, const TypedGraph& dom, const TypedGraph& cod) {
    ordered_json out;
    out["vertex_map"] = ordered_json::object();
    out["edge_map"] = ordered_json::object();
    for (int i = 0; i < dom.n_vertices(); ++i)
        out["vertex_map"][dom.vertex(i).id] = cod.vertex(m.v[i]).id;
    for (int i = 0; i < dom.n_edges(); ++i)
        out["edge_map"][dom.edge(i).id] = cod.edge(m.e[i]).id;
    return out;
}

Morphism morphism_from_jobj(const json& j, const TypedGraph& dom, const TypedGraph& cod) {
    check_keys(j, {"vertex_map", "edge_map"}, {"vertex_map", "edge_map"}, "morphism");
    Morphism m;
    m.v.assign(dom.n_vertices(), -1);
    m.e.assign(dom.n_edges(), -1);
    for (auto it = j.at("vertex_map").begin(); it != j.at("vertex_map").end(); ++it) {
        int d = dom.vertex_index(it.key());
        if (d < 0) throw std::invalid_argument("morphism: unknown domain vertex '" + it.key() + "'");
        int c = cod.vertex_index(it.value().get<std::string>());
        if (c < 0) throw std::invalid_argument("morphism: unknown codomain vertex");
        m.v[d] = c;
    }
    for (auto it = j.at("edge_map").begin(); it != j.at("edge_map").end(); ++it) {
        int d = dom.edge_index(it.key());
        if (d < 0) throw std::invalid_argument("morphism: unknown domain edge '" + it.key() + "'");
        int c = cod.edge_index(it.value().get<std::string>());
        if (c < 0) throw std::invalid_argument("morphism: unknown codomain edge");
        m.e[d] = c;
    }
    for (int i = 0; i < dom.n_vertices(); ++i)
        if (m.v[i] < 0) throw std::invalid_argument("morphism: vertex map not total");
    for (int i = 0; i < dom.n_edges(); ++i)
        if (m.e[i] < 0) throw std::invalid_argument("morphism: edge map not total");
    std::string why;
    if (!is_monomorphism(dom, cod, m, &why))
        throw std::invalid_argument("morphism: not a monomorphism (" + why + ")");
    return m;
}

ordered_json condition_to_ojson(const Condition& c, const TypedGraph& context) {
    ordered_json out;
    switch (c.kind) {
        case Condition::Kind::True:
            out["kind"] = "true";
            return out;
        case Condition::Kind::Not:
            out["kind"] = "not";
            out["sub"] = condition_to_ojson(c.subs[0], context);
            return out;
        case Condition::Kind::And: {
            out["kind"] = "and";
            out["subs"] = ordered_json::array();
            for (const auto& s : c.subs) out["subs"].push_back(condition_to_ojson(s, context));
            return out;
        }
        case Condition::Kind::Exists:
            out["kind"] = "exists";
            out["codomain"] = graph_to_ojson(c.y);
            out["embed"] = morphism_to_ojson(c.embed, context, c.y);
            out["sub"] = condition_to_ojson(c.subs[0], c.y);
            return out;
    }
    return out;
}

Condition condition_from_jobj(const json& j, const TypedGraph& context,
                              const std::shared_ptr<const TypeGraph>& types) {
    if (j.is_string() && j.get<std::string>() == "true") return Condition::truth();
    if (!j.is_object()) throw std::invalid_argument("condition: expected object");
    std::string kind = get_str(j, "kind", "condition");
    if (kind == "true") {
        check_keys(j, {"kind"}, {"kind"}, "condition");
        return Condition::truth();
    }
    if (kind == "not") {
        check_keys(j, {"kind", "sub"}, {"kind", "sub"}, "condition");
        return Condition::negation(condition_from_jobj(j.at("sub"), context, types));
    }
    if (kind == "and") {
        check_keys(j, {"kind", "subs"}, {"kind", "subs"}, "condition");
        std::vector<Condition> subs;
        for (const auto& js : j.at("subs")) subs.push_back(condition_from_jobj(js, context, types));
        return Condition::conjunction(std::move(subs));
    }
    if (kind == "exists" || kind == "forall") {
        check_keys(j, {"kind", "codomain", "embed", "sub"}, {"kind", "codomain", "embed", "sub"},
                   "condition");
        TypedGraph y = graph_from_jobj(j.at("codomain"), types);
        Morphism embed = morphism_from_jobj(j.at("embed"), context, y);
        Condition sub = condition_from_jobj(j.at("sub"), y, types);
        if (kind == "exists") return Condition::exists(std::move(y), std::move(embed), std::move(sub));
        return Condition::forall(std::move(y), std::move(embed), std::move(sub));
    }
    throw std::invalid_argument("condition: unknown kind '" + kind + "'");
}

}  // namespace rasm::jsondetail

namespace rasm {

using namespace jsondetail;

std::string type_graph_to_json(const TypeGraph& tg) {
    ordered_json out;
    out["vertex_types"] = tg.vertex_types;
    out["edge_types"] = ordered_json::array();
    for (const auto& et : tg.edge_types) {
        ordered_json je;
        je["label"] = et.label;
        je["src"] = tg.vertex_types[et.src];
        je["tgt"] = tg.vertex_types[et.tgt];
        out["edge_types"].push_back(std::move(je));
    }
    return out.dump(2);
}

std::shared_ptr<const TypeGraph> type_graph_from_json(const std::string& text) {
    json j = parse_text(text, "type graph");
    check_keys(j, {"vertex_types", "edge_types"}, {"vertex_types", "edge_types"}, "type graph");
    auto tg = std::make_shared<TypeGraph>();
    for (const auto& v : j.at("vertex_types")) tg->vertex_types.push_back(v.get<std::string>());
    for (const auto& je : j.at("edge_types")) {
        check_keys(je, {"label", "src", "tgt"}, {"label", "src", "tgt"}, "edge type");
        TypeGraph::EdgeType et;
        et.label = get_str(je, "label", "edge type");
        et.src = tg->vertex_type_index(get_str(je, "src", "edge type"));
        et.tgt = tg->vertex_type_index(get_str(je, "tgt", "edge type"));
        if (et.src < 0 || et.tgt < 0)
            throw std::invalid_argument("edge type: unknown endpoint vertex type");
        tg->edge_types.push_back(std::move(et));
    }
    return tg;
}

std::string graph_to_json(const TypedGraph& g) { return graph_to_ojson(g).dump(2); }

TypedGraph graph_from_json(const std::string& text, std::shared_ptr<const TypeGraph> types) {
    return graph_from_jobj(parse_text(text, "graph"), std::move(types));
}

std::string morphism_to_json(const Morphism& m, const TypedGraph& dom, const TypedGraph& cod) {
    return morphism_to_ojson(m, dom, cod).dump(2);
}

Morphism morphism_from_json(const std::string& text, const TypedGraph& dom, const TypedGraph& cod) {
    return morphism_from_jobj(parse_text(text, "morphism"), dom, cod);
}

std::string condition_to_json(const Condition& c, const TypedGraph& context) {
    return condition_to_ojson(c, context).dump(2);
}

Condition condition_from_json(const std::string& text, const TypedGraph& context,
                              std::shared_ptr<const TypeGraph> types) {
    return condition_from_jobj(parse_text(text, "condition"), context, types);
}

}  // namespace rasm
