#ifndef RASM_GRAPH_JSON_HPP
#define RASM_GRAPH_JSON_HPP

#include <memory>
#include <string>

#include "rasm/condition.hpp"
#include "rasm/typed_graph.hpp"

namespace rasm {

// External formats.  Parsers are strict: unknown or missing fields raise
// std::invalid_argument with the offending key in the message.
//
// type graph   {"vertex_types":[str], "edge_types":[{"label":str,"src":str,"tgt":str}]}
// graph        {"vertices":[{"id":str,"type":str}],
//               "edges":[{"id":str,"type":str,"src":str,"tgt":str}]}
// morphism     {"vertex_map":{dom id: cod id}, "edge_map":{dom id: cod id}}
// condition    tagged union on "kind": "true" | {"kind":"exists","codomain":graph,
//              "embed":morphism,"sub":condition} | {"kind":"not","sub":c}
//              | {"kind":"and","subs":[c]} | {"kind":"forall",...like exists}
//              ("forall" parses to the stored Not/Exists/Not form)

std::string type_graph_to_json(const TypeGraph& tg);
std::shared_ptr<const TypeGraph> type_graph_from_json(const std::string& text);

std::string graph_to_json(const TypedGraph& g);
TypedGraph graph_from_json(const std::string& text, std::shared_ptr<const TypeGraph> types);

std::string morphism_to_json(const Morphism& m, const TypedGraph& dom, const TypedGraph& cod);
Morphism morphism_from_json(const std::string& text, const TypedGraph& dom, const TypedGraph& cod);

std::string condition_to_json(const Condition& c, const TypedGraph& context);
Condition condition_from_json(const std::string& text, const TypedGraph& context,
                              std::shared_ptr<const TypeGraph> types);

}  // namespace rasm

#endif
