#include "rasm/match.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <tuple>

namespace rasm {

namespace {

struct Searcher {
    const TypedGraph& p;
    const TypedGraph& h;
    const MonoSpec* spec;
    const std::function<bool(const Morphism&)>& visit;
    bool count_only;

    std::vector<int> vmap;        // pattern vertex -> host vertex or -1
    std::vector<char> hv_used;
    std::vector<int> order;       // vertex assignment order
    long long count = 0;
    bool stopped = false;

    Searcher(const TypedGraph& p_, const TypedGraph& h_, const MonoSpec* spec_,
             const std::function<bool(const Morphism&)>& visit_, bool count_only_)
        : p(p_), h(h_), spec(spec_), visit(visit_), count_only(count_only_) {}

    void plan_order() {
        const int n = p.n_vertices();
        std::vector<char> placed(n, 0);
        // fixed vertices first, in index order
        if (spec)
            for (int v = 0; v < n; ++v)
                if (spec->fix_v[v] >= 0) {
                    order.push_back(v);
                    placed[v] = 1;
                }
        auto degree_to_placed = [&](int v) {
            int d = 0;
            for (int e : p.out_edges(v)) d += placed[p.edge(e).tgt];
            for (int e : p.in_edges(v)) d += placed[p.edge(e).src];
            return d;
        };
        for (int k = static_cast<int>(order.size()); k < n; ++k) {
            int best = -1, best_d = -1;
            for (int v = 0; v < n; ++v) {
                if (placed[v]) continue;
                int d = degree_to_placed(v);
                // prefer constrained vertices; break ties toward higher total degree
                int total = static_cast<int>(p.out_edges(v).size() + p.in_edges(v).size());
                if (d > best_d || (d == best_d && best >= 0 &&
                                   total > static_cast<int>(p.out_edges(best).size() +
                                                            p.in_edges(best).size()))) {
                    best = v;
                    best_d = d;
                }
            }
            order.push_back(best);
            placed[best] = 1;
        }
    }

    // parallel-class feasibility against already-assigned endpoints
    bool edges_ok(int pv) {
        int hv = vmap[pv];
        std::map<std::pair<int, int>, int> need_out, need_in;  // (etype, other pattern v)
        for (int e : p.out_edges(pv)) {
            int q = p.edge(e).tgt;
            if (vmap[q] >= 0) ++need_out[{p.edge(e).type, q}];
        }
        for (int e : p.in_edges(pv)) {
            int q = p.edge(e).src;
            if (q == pv) continue;  // loops counted once via out
            if (vmap[q] >= 0) ++need_in[{p.edge(e).type, q}];
        }
        for (const auto& [key, k] : need_out)
            if (h.parallel_count(key.first, hv, vmap[key.second]) < k) return false;
        for (const auto& [key, k] : need_in)
            if (h.parallel_count(key.first, vmap[key.second], hv) < k) return false;
        return true;
    }

    void emit_with_edges() {
        // group pattern edges by (type, src, tgt); assign host edges injectively
        std::map<std::tuple<int, int, int>, std::vector<int>> groups;
        for (int e = 0; e < p.n_edges(); ++e)
            groups[{p.edge(e).type, p.edge(e).src, p.edge(e).tgt}].push_back(e);

        if (count_only) {
            long long total = 1;
            for (const auto& [key, pes] : groups) {
                auto [t, s, d] = key;
                long long m = h.parallel_count(t, vmap[s], vmap[d]);
                for (std::size_t i = 0; i < pes.size(); ++i) total *= m - static_cast<long long>(i);
                if (total <= 0) return;  // cannot happen after pruning, defensive
            }
            // honor fixed edges by falling back to explicit enumeration
            bool has_fixed_edge = false;
            if (spec)
                for (int fe : spec->fix_e)
                    if (fe >= 0) has_fixed_edge = true;
            if (!has_fixed_edge) {
                count += total;
                return;
            }
        }

        std::vector<std::pair<std::vector<int>, std::vector<int>>> glist;  // (pattern edges, host candidates)
        for (const auto& [key, pes] : groups) {
            auto [t, s, d] = key;
            std::vector<int> cands;
            for (int he : h.out_edges(vmap[s]))
                if (h.edge(he).type == t && h.edge(he).tgt == vmap[d]) cands.push_back(he);
            std::sort(cands.begin(), cands.end());
            glist.push_back({pes, std::move(cands)});
        }

        Morphism m;
        m.v = vmap;
        m.e.assign(p.n_edges(), -1);
        std::vector<char> he_used(h.n_edges(), 0);

        std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t gi, std::size_t ei) {
            if (stopped) return;
            if (gi == glist.size()) {
                if (count_only) {
                    ++count;
                } else if (!visit(m)) {
                    stopped = true;
                }
                return;
            }
            const auto& [pes, cands] = glist[gi];
            if (ei == pes.size()) {
                rec(gi + 1, 0);
                return;
            }
            int pe = pes[ei];
            int forced = spec && spec->fix_e[pe] >= 0 ? spec->fix_e[pe] : -1;
            for (int he : cands) {
                if (he_used[he]) continue;
                if (forced >= 0 && he != forced) continue;
                he_used[he] = 1;
                m.e[pe] = he;
                rec(gi, ei + 1);
                he_used[he] = 0;
                m.e[pe] = -1;
                if (stopped) return;
            }
        };
        rec(0, 0);
    }

    void assign(std::size_t k) {
        if (stopped) return;
        if (k == order.size()) {
            emit_with_edges();
            return;
        }
        int pv = order[k];
        int ptype = p.vertex(pv).type;
        int forced = spec && spec->fix_v[pv] >= 0 ? spec->fix_v[pv] : -1;
        for (int hv = 0; hv < h.n_vertices(); ++hv) {
            if (forced >= 0 && hv != forced) continue;
            if (hv_used[hv] || h.vertex(hv).type != ptype) continue;
            vmap[pv] = hv;
            hv_used[hv] = 1;
            if (edges_ok(pv)) assign(k + 1);
            hv_used[hv] = 0;
            vmap[pv] = -1;
            if (stopped) return;
        }
    }

    void run() {
        if (spec && (static_cast<int>(spec->fix_v.size()) != p.n_vertices() ||
                     static_cast<int>(spec->fix_e.size()) != p.n_edges()))
            throw std::invalid_argument("MonoSpec size mismatch");
        vmap.assign(p.n_vertices(), -1);
        hv_used.assign(h.n_vertices(), 0);
        plan_order();
        assign(0);
    }
};

}  // namespace

void for_each_mono(const TypedGraph& pattern, const TypedGraph& host, const MonoSpec* spec,
                   const std::function<bool(const Morphism&)>& visit) {
    Searcher s(pattern, host, spec, visit, false);
    s.run();
}

std::vector<Morphism> enumerate_monos(const TypedGraph& pattern, const TypedGraph& host,
                                      const MonoSpec* spec) {
    std::vector<Morphism> out;
    for_each_mono(pattern, host, spec, [&](const Morphism& m) {
        out.push_back(m);
        return true;
    });
    std::sort(out.begin(), out.end(), [](const Morphism& a, const Morphism& b) {
        if (a.v != b.v) return a.v < b.v;
        return a.e < b.e;
    });
    return out;
}

long long count_monos(const TypedGraph& pattern, const TypedGraph& host, const MonoSpec* spec) {
    static const std::function<bool(const Morphism&)> nop = [](const Morphism&) { return true; };
    Searcher s(pattern, host, spec, nop, true);
    s.run();
    return s.count;
}

}  // namespace rasm
