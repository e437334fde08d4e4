#ifndef RASM_TYPED_GRAPH_HPP
#define RASM_TYPED_GRAPH_HPP

#include <memory>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "rasm/type_graph.hpp"

namespace rasm {

struct Vertex {
    std::string id;
    int type = 0;
};

struct Edge {
    std::string id;
    int type = 0;
    int src = 0;  // vertex indices
    int tgt = 0;
};

/**
 * Finite directed multigraph typed over a shared TypeGraph.  Vertices and
 * edges carry stable string ids (the identity-carrying layer: parallel
 * edges are distinguished by id only).  Graphs are built by add_* calls
 * and never mutated in place afterwards; rewriting constructs new graphs.
 */
class TypedGraph {
  public:
    TypedGraph() = default;
    explicit TypedGraph(std::shared_ptr<const TypeGraph> types) : tg_(std::move(types)) {}

    const std::shared_ptr<const TypeGraph>& types_ptr() const { return tg_; }
    const TypeGraph& types() const {
        if (!tg_) throw std::logic_error("TypedGraph: no type graph attached");
        return *tg_;
    }

    int n_vertices() const { return static_cast<int>(vertices_.size()); }
    int n_edges() const { return static_cast<int>(edges_.size()); }
    const Vertex& vertex(int i) const { return vertices_[i]; }
    const Edge& edge(int i) const { return edges_[i]; }

    int add_vertex(const std::string& id, int type) {
        if (!tg_ || type < 0 || type >= static_cast<int>(tg_->vertex_types.size()))
            throw std::invalid_argument("add_vertex: unknown vertex type");
        if (vidx_.count(id)) throw std::invalid_argument("add_vertex: duplicate id '" + id + "'");
        vertices_.push_back({id, type});
        out_.emplace_back();
        in_.emplace_back();
        int idx = n_vertices() - 1;
        vidx_.emplace(id, idx);
        return idx;
    }

    int add_vertex(const std::string& id, const std::string& type_label) {
        int t = types().vertex_type_index(type_label);
        if (t < 0) throw std::invalid_argument("add_vertex: unknown vertex type '" + type_label + "'");
        return add_vertex(id, t);
    }

    int add_edge(const std::string& id, int type, int src, int tgt) {
        if (!tg_ || type < 0 || type >= static_cast<int>(tg_->edge_types.size()))
            throw std::invalid_argument("add_edge: unknown edge type");
        if (src < 0 || src >= n_vertices() || tgt < 0 || tgt >= n_vertices())
            throw std::invalid_argument("add_edge: endpoint out of range");
        if (eidx_.count(id)) throw std::invalid_argument("add_edge: duplicate id '" + id + "'");
        const auto& et = tg_->edge_types[type];
        if (vertices_[src].type != et.src || vertices_[tgt].type != et.tgt)
            throw std::invalid_argument("add_edge: endpoint types do not fit edge type '" + et.label + "'");
        edges_.push_back({id, type, src, tgt});
        int idx = n_edges() - 1;
        eidx_.emplace(id, idx);
        out_[src].push_back(idx);
        in_[tgt].push_back(idx);
        return idx;
    }

    int add_edge(const std::string& id, const std::string& type_label, const std::string& src_id,
                 const std::string& tgt_id) {
        int t = types().edge_type_index(type_label);
        if (t < 0) throw std::invalid_argument("add_edge: unknown edge type '" + type_label + "'");
        int s = vertex_index(src_id), d = vertex_index(tgt_id);
        if (s < 0 || d < 0) throw std::invalid_argument("add_edge: unknown endpoint id");
        return add_edge(id, t, s, d);
    }

    int vertex_index(const std::string& id) const {
        auto it = vidx_.find(id);
        return it == vidx_.end() ? -1 : it->second;
    }

    int edge_index(const std::string& id) const {
        auto it = eidx_.find(id);
        return it == eidx_.end() ? -1 : it->second;
    }

    const std::vector<int>& out_edges(int v) const { return out_[v]; }
    const std::vector<int>& in_edges(int v) const { return in_[v]; }

    // Counts parallel edges of one type between a fixed vertex pair.
    int parallel_count(int type, int src, int tgt) const {
        int c = 0;
        for (int e : out_[src])
            if (edges_[e].type == type && edges_[e].tgt == tgt) ++c;
        return c;
    }

  private:
    std::shared_ptr<const TypeGraph> tg_;
    std::vector<Vertex> vertices_;
    std::vector<Edge> edges_;
    std::unordered_map<std::string, int> vidx_, eidx_;
    std::vector<std::vector<int>> out_, in_;
};

/**
 * Injective structure-preserving map between typed graphs over the same
 * TypeGraph, stored as index vectors over the domain (v[i] = codomain
 * vertex index of domain vertex i, likewise e for edges).
 */
struct Morphism {
    std::vector<int> v;
    std::vector<int> e;

    bool operator==(const Morphism&) const = default;

    static Morphism identity(const TypedGraph& g) {
        Morphism m;
        m.v.resize(g.n_vertices());
        m.e.resize(g.n_edges());
        for (int i = 0; i < g.n_vertices(); ++i) m.v[i] = i;
        for (int i = 0; i < g.n_edges(); ++i) m.e[i] = i;
        return m;
    }
};

// g after f: for f: X->Y and g: Y->Z yields X->Z.
inline Morphism compose(const Morphism& f, const Morphism& g) {
    Morphism c;
    c.v.resize(f.v.size());
    c.e.resize(f.e.size());
    for (std::size_t i = 0; i < f.v.size(); ++i) c.v[i] = g.v[f.v[i]];
    for (std::size_t i = 0; i < f.e.size(); ++i) c.e[i] = g.e[f.e[i]];
    return c;
}

// Total, injective, preserves types, sources and targets.
inline bool is_monomorphism(const TypedGraph& dom, const TypedGraph& cod, const Morphism& m,
                            std::string* why = nullptr) {
    auto fail = [&](const std::string& msg) {
        if (why) *why = msg;
        return false;
    };
    if (static_cast<int>(m.v.size()) != dom.n_vertices() ||
        static_cast<int>(m.e.size()) != dom.n_edges())
        return fail("map size mismatch");
    std::vector<char> vused(cod.n_vertices(), 0), eused(cod.n_edges(), 0);
    for (int i = 0; i < dom.n_vertices(); ++i) {
        int j = m.v[i];
        if (j < 0 || j >= cod.n_vertices()) return fail("vertex image out of range");
        if (vused[j]) return fail("vertex map not injective");
        vused[j] = 1;
        if (dom.vertex(i).type != cod.vertex(j).type) return fail("vertex type not preserved");
    }
    for (int i = 0; i < dom.n_edges(); ++i) {
        int j = m.e[i];
        if (j < 0 || j >= cod.n_edges()) return fail("edge image out of range");
        if (eused[j]) return fail("edge map not injective");
        eused[j] = 1;
        const Edge& de = dom.edge(i);
        const Edge& ce = cod.edge(j);
        if (de.type != ce.type) return fail("edge type not preserved");
        if (m.v[de.src] != ce.src || m.v[de.tgt] != ce.tgt) return fail("incidence not preserved");
    }
    return true;
}

}  // namespace rasm

#endif
