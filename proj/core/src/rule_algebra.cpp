#include "rasm/rule_algebra.hpp"

#include <json.hpp>

#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <utility>

#include "rasm/match.hpp"
#include "rasm/parallel.hpp"

namespace rasm {

namespace {

/**
 * Typing universe for rule encodings, derived deterministically from the
 * base universe.  Every part graph (O, K, I) gets its own copies of the
 * base vertex types ("P<part>v<t>") plus one reified vertex type per base
 * edge type ("P<part>e<t>") with source/target connector edge types; the
 * two rule embeddings become edges from K-material to O- and I-material.
 */
std::shared_ptr<const TypeGraph> encoded_type_graph(const TypeGraph& base) {
    auto etg = std::make_shared<TypeGraph>();
    const char* parts = "OKI";
    int nbv = static_cast<int>(base.vertex_types.size());
    int nbe = static_cast<int>(base.edge_types.size());
    auto vt = [&](int p, bool reified, int t) { return p * (nbv + nbe) + (reified ? nbv : 0) + t; };
    for (int p = 0; p < 3; ++p) {
        std::string pre = std::string("P") + parts[p];
        for (int t = 0; t < nbv; ++t) etg->vertex_types.push_back(pre + "v" + std::to_string(t));
        for (int t = 0; t < nbe; ++t) etg->vertex_types.push_back(pre + "e" + std::to_string(t));
    }
    for (int p = 0; p < 3; ++p) {
        std::string pre = std::string("P") + parts[p];
        for (int t = 0; t < nbe; ++t) {
            etg->edge_types.push_back(
                {pre + "s" + std::to_string(t), vt(p, true, t), vt(p, false, base.edge_types[t].src)});
            etg->edge_types.push_back(
                {pre + "t" + std::to_string(t), vt(p, true, t), vt(p, false, base.edge_types[t].tgt)});
        }
    }
    for (int side = 0; side < 2; ++side) {
        std::string pre = side == 0 ? "MO" : "MI";
        int tp = side == 0 ? 0 : 2;  // part index of O resp. I
        for (int t = 0; t < nbv; ++t)
            etg->edge_types.push_back({pre + "v" + std::to_string(t), vt(1, false, t), vt(tp, false, t)});
        for (int t = 0; t < nbe; ++t)
            etg->edge_types.push_back({pre + "e" + std::to_string(t), vt(1, true, t), vt(tp, true, t)});
    }
    return etg;
}

TypedGraph encode_rule(const Rule& r) {
    TypedGraph enc(encoded_type_graph(r.k.types()));
    const TypedGraph* part[3] = {&r.o, &r.k, &r.i};
    const char* pref[3] = {"O", "K", "I"};
    for (int p = 0; p < 3; ++p) {
        const TypedGraph& g = *part[p];
        std::string P = std::string("P") + pref[p];
        for (int v = 0; v < g.n_vertices(); ++v)
            enc.add_vertex(pref[p] + ("v" + std::to_string(v)),
                           P + "v" + std::to_string(g.vertex(v).type));
        for (int e = 0; e < g.n_edges(); ++e)
            enc.add_vertex(pref[p] + ("e" + std::to_string(e)),
                           P + "e" + std::to_string(g.edge(e).type));
        for (int e = 0; e < g.n_edges(); ++e) {
            const Edge& ed = g.edge(e);
            enc.add_edge(pref[p] + ("s" + std::to_string(e)), P + "s" + std::to_string(ed.type),
                         pref[p] + ("e" + std::to_string(e)), pref[p] + ("v" + std::to_string(ed.src)));
            enc.add_edge(pref[p] + ("t" + std::to_string(e)), P + "t" + std::to_string(ed.type),
                         pref[p] + ("e" + std::to_string(e)), pref[p] + ("v" + std::to_string(ed.tgt)));
        }
    }
    for (int v = 0; v < r.k.n_vertices(); ++v) {
        std::string t = std::to_string(r.k.vertex(v).type);
        enc.add_edge("mov" + std::to_string(v), "MOv" + t, "Kv" + std::to_string(v),
                     "Ov" + std::to_string(r.ko.v[v]));
        enc.add_edge("miv" + std::to_string(v), "MIv" + t, "Kv" + std::to_string(v),
                     "Iv" + std::to_string(r.ki.v[v]));
    }
    for (int e = 0; e < r.k.n_edges(); ++e) {
        std::string t = std::to_string(r.k.edge(e).type);
        enc.add_edge("moe" + std::to_string(e), "MOe" + t, "Ke" + std::to_string(e),
                     "Oe" + std::to_string(r.ko.e[e]));
        enc.add_edge("mie" + std::to_string(e), "MIe" + t, "Ke" + std::to_string(e),
                     "Ie" + std::to_string(r.ki.e[e]));
    }
    return enc;
}

void prune_zeros(std::map<int, Rat>& col) {
    for (auto it = col.begin(); it != col.end();) {
        if (it->second == 0)
            it = col.erase(it);
        else
            ++it;
    }
}

void require_same_basis(const SparseOperator& a, const SparseOperator& b) {
    if (a.basis != b.basis)
        throw std::invalid_argument("operator arithmetic requires one shared basis object");
}

}  // namespace

RuleClassKey rule_class_key(const Rule& r) {
    CanonicalKey ck = canonical_key(encode_rule(r));
    // base universe fingerprint up front (the encoding only preserves type
    // indices), then a length prefix so the key/fingerprint split stays
    // unambiguous
    return std::to_string(r.k.types().fingerprint()) + "/" + std::to_string(ck.size()) + ":" +
           ck + condition_fingerprint(r.condition);
}

FormalSum FormalSum::of(const Rule& r, const Rat& coeff) {
    FormalSum s;
    s.add(coeff, r);
    return s;
}

void FormalSum::add(const Rat& coeff, const Rule& r) {
    if (coeff == 0) return;
    RuleClassKey key = rule_class_key(r);
    auto it = terms.find(key);
    if (it == terms.end()) {
        terms.emplace(std::move(key), Term{coeff, r});
        return;
    }
    it->second.coeff += coeff;
    if (it->second.coeff == 0) terms.erase(it);
}

void FormalSum::add_scaled(const FormalSum& other, const Rat& scale) {
    for (const auto& [key, t] : other.terms) add(t.coeff * scale, t.rep);
}

FormalSum compose(const Rule& r2, const Rule& r1, const ConstraintSet& constraints) {
    if (!(r1.o.types() == r2.i.types()))
        throw std::invalid_argument("compose: rules typed over different universes");
    const TypedGraph& o1 = r1.o;
    const TypedGraph& i2 = r2.i;
    int nv = o1.n_vertices(), ne = o1.n_edges();
    if (nv > 24 || ne > 24)
        throw std::invalid_argument("compose: overlap enumeration infeasible, output pattern too large");

    // backward direction un-applies r1 (condition dropped: conditions gate
    // matches in a state, not the composite construction)
    Rule r1_rev(r1.name + "~", r1.i, r1.k, r1.o, r1.ki, r1.ko);
    Rule r2_bare(r2.name, r2.o, r2.k, r2.i, r2.ko, r2.ki);

    FormalSum out;
    for (std::uint32_t vm = 0; vm < (1u << nv); ++vm) {
        std::vector<int> vs;          // overlap vertices as ascending o1 indices
        std::vector<int> vpos(nv, -1);
        for (int v = 0; v < nv; ++v)
            if (vm >> v & 1) {
                vpos[v] = static_cast<int>(vs.size());
                vs.push_back(v);
            }
        std::vector<int> elig;  // edges with both endpoints selected
        for (int e = 0; e < ne; ++e)
            if (vpos[o1.edge(e).src] >= 0 && vpos[o1.edge(e).tgt] >= 0) elig.push_back(e);
        for (std::uint32_t em = 0; em < (1u << elig.size()); ++em) {
            TypedGraph s(o1.types_ptr());
            for (int v : vs) s.add_vertex(o1.vertex(v).id, o1.vertex(v).type);
            std::vector<int> epos(ne, -1);
            for (std::size_t x = 0; x < elig.size(); ++x) {
                if (!(em >> x & 1)) continue;
                const Edge& ed = o1.edge(elig[x]);
                epos[elig[x]] = s.add_edge(ed.id, ed.type, vpos[ed.src], vpos[ed.tgt]);
            }
            for (const Morphism& f : enumerate_monos(s, i2)) {
                // gluing of i2 and o1 along the overlap: all of i2 first
                // ("a"/"ea" ids, indices unchanged), then the rest of o1
                TypedGraph n(i2.types_ptr());
                for (int v = 0; v < i2.n_vertices(); ++v)
                    n.add_vertex("a" + std::to_string(v), i2.vertex(v).type);
                Morphism nu1;
                nu1.v.assign(nv, -1);
                for (int v = 0; v < nv; ++v)
                    nu1.v[v] = vpos[v] >= 0
                                   ? f.v[vpos[v]]
                                   : n.add_vertex("b" + std::to_string(v), o1.vertex(v).type);
                for (int e = 0; e < i2.n_edges(); ++e) {
                    const Edge& ed = i2.edge(e);
                    n.add_edge("ea" + std::to_string(e), ed.type, ed.src, ed.tgt);
                }
                nu1.e.assign(ne, -1);
                for (int e = 0; e < ne; ++e) {
                    if (epos[e] >= 0) {
                        nu1.e[e] = f.e[epos[e]];
                        continue;
                    }
                    const Edge& ed = o1.edge(e);
                    nu1.e[e] = n.add_edge("eb" + std::to_string(e), ed.type, nu1.v[ed.src],
                                          nu1.v[ed.tgt]);
                }
                Morphism nu2 = Morphism::identity(i2);

                if (!is_pattern(constraints, n)) continue;
                // the un-application must not leave dangling edges, otherwise
                // no input pattern exists for this overlap
                if (!dpo_admissible(r1_rev, n, nu1)) continue;
                DirectDerivation back = apply(r1_rev, n, nu1, Semantics::DPO);
                DirectDerivation fwd = apply(r2_bare, n, nu2, Semantics::SqPO);

                // composite interface: gluing material kept by both directions
                TypedGraph k21(n.types_ptr());
                Morphism ki21, ko21;
                std::vector<int> kv_of_n(n.n_vertices(), -1);
                for (int v = 0; v < n.n_vertices(); ++v) {
                    if (back.host_v_map[v] < 0 || fwd.host_v_map[v] < 0) continue;
                    kv_of_n[v] = k21.add_vertex(n.vertex(v).id, n.vertex(v).type);
                    ki21.v.push_back(back.host_v_map[v]);
                    ko21.v.push_back(fwd.host_v_map[v]);
                }
                for (int e = 0; e < n.n_edges(); ++e) {
                    if (back.host_e_map[e] < 0 || fwd.host_e_map[e] < 0) continue;
                    const Edge& ed = n.edge(e);
                    k21.add_edge(ed.id, ed.type, kv_of_n[ed.src], kv_of_n[ed.tgt]);
                    ki21.e.push_back(back.host_e_map[e]);
                    ko21.e.push_back(fwd.host_e_map[e]);
                }
                Rule comp(r2.name + "*" + r1.name, fwd.result, std::move(k21), back.result,
                          std::move(ko21), std::move(ki21));
                out.add(Rat(1), comp);
            }
        }
    }
    return out;
}

FormalSum compose(const FormalSum& a, const FormalSum& b, const ConstraintSet& constraints) {
    FormalSum out;
    for (const auto& [ka, ta] : a.terms)
        for (const auto& [kb, tb] : b.terms)
            out.add_scaled(compose(ta.rep, tb.rep, constraints), ta.coeff * tb.coeff);
    return out;
}

std::vector<int> StateBasis::interior(int max_generation) const {
    std::vector<int> out;
    for (int j = 0; j < size(); ++j)
        if (generation[j] <= max_generation) out.push_back(j);
    return out;
}

StateBasis state_basis(const GenerationTable& table) {
    StateBasis b;
    for (std::size_t n = 0; n < table.generations.size(); ++n) {
        for (const auto& [key, entry] : table.generations[n]) {
            if (b.index.count(key)) continue;
            b.index.emplace(key, b.size());
            b.keys.push_back(key);
            b.reps.push_back(entry.representative);
            b.generation.push_back(static_cast<int>(n));
        }
    }
    return b;
}

SparseOperator::SparseOperator(std::shared_ptr<const StateBasis> b) : basis(std::move(b)) {
    if (!basis) throw std::invalid_argument("SparseOperator: null basis");
    cols.resize(basis->size());
    col_complete.assign(basis->size(), 1);
}

Rat SparseOperator::entry(int row, int col) const {
    const auto& c = cols[col];
    auto it = c.find(row);
    return it == c.end() ? Rat(0) : it->second;
}

Rat SparseOperator::column_sum(int col) const {
    Rat s(0);
    for (const auto& [row, v] : cols[col]) s += v;
    return s;
}

SparseOperator represent(const FormalSum& fs, std::shared_ptr<const StateBasis> basis,
                         Semantics semantics) {
    SparseOperator op(std::move(basis));
    // identity-shaped rules never move the state: count matches onto the
    // diagonal instead of materializing derivations
    std::vector<std::pair<Rat, const Rule*>> stationary;
    std::vector<WeightedRule> moving;
    for (const auto& [key, t] : fs.terms) {
        if (is_identity_rule(t.rep))
            stationary.emplace_back(t.coeff, &t.rep);
        else
            moving.push_back({t.coeff, t.rep});
    }
    const StateBasis& b = *op.basis;
    parallel_for(static_cast<std::size_t>(b.size()), [&](std::size_t sj) {
        int j = static_cast<int>(sj);
        const TypedGraph& x = b.reps[j];
        auto& col = op.cols[j];
        for (const auto& [coeff, rule] : stationary) {
            Int cnt = count_matches(*rule, x, semantics);
            if (cnt != 0) col[j] += coeff * Rat(cnt);
        }
        if (!moving.empty()) {
            for (const auto& [key, dc] : derive_all(moving, x, semantics)) {
                if (dc.weight == 0) continue;  // exact zero carries no mass anywhere
                int row = b.find(key);
                if (row < 0)
                    op.col_complete[j] = 0;  // single-step result left the basis
                else
                    col[row] += dc.weight;
            }
        }
        prune_zeros(col);
    });
    return op;
}

SparseOperator scale(const SparseOperator& a, const Rat& c) {
    SparseOperator r(a.basis);
    r.col_complete = a.col_complete;
    if (c == 0) return r;
    for (std::size_t j = 0; j < a.cols.size(); ++j)
        for (const auto& [row, v] : a.cols[j]) r.cols[j].emplace(row, v * c);
    return r;
}

SparseOperator add(const SparseOperator& a, const SparseOperator& b) {
    require_same_basis(a, b);
    SparseOperator r(a.basis);
    for (std::size_t j = 0; j < a.cols.size(); ++j) {
        r.col_complete[j] = a.col_complete[j] && b.col_complete[j];
        auto acc = a.cols[j];
        for (const auto& [row, v] : b.cols[j]) {
            auto [it, fresh] = acc.emplace(row, v);
            if (!fresh) it->second += v;
        }
        prune_zeros(acc);
        r.cols[j] = std::move(acc);
    }
    return r;
}

SparseOperator subtract(const SparseOperator& a, const SparseOperator& b) {
    return add(a, scale(b, Rat(-1)));
}

SparseOperator product(const SparseOperator& a, const SparseOperator& b) {
    require_same_basis(a, b);
    SparseOperator c(a.basis);
    parallel_for(b.cols.size(), [&](std::size_t j) {
        bool complete = b.col_complete[j];
        auto& acc = c.cols[j];
        for (const auto& [k, w] : b.cols[j]) {
            if (!a.col_complete[k]) complete = false;
            for (const auto& [row, v] : a.cols[k]) {
                auto [it, fresh] = acc.emplace(row, w * v);
                if (!fresh) it->second += w * v;
            }
        }
        prune_zeros(acc);
        c.col_complete[j] = complete;
    });
    return c;
}

SparseOperator commutator(const SparseOperator& a, const SparseOperator& b) {
    return subtract(product(a, b), product(b, a));
}

namespace {

bool check_complete(const SparseOperator& lhs, const SparseOperator& rhs, int j,
                    IdentityReport& rep) {
    if (lhs.col_complete[j] && rhs.col_complete[j]) return true;
    rep.pass = false;
    rep.witness_column = j;
    rep.detail = "column " + std::to_string(j) + " (" + hex_key(lhs.basis->keys[j]) +
                 ") carries truncated data; deepen the basis";
    return false;
}

}  // namespace

IdentityReport verify_identity(const SparseOperator& lhs, const SparseOperator& rhs,
                               const std::vector<int>& columns) {
    require_same_basis(lhs, rhs);
    IdentityReport rep;
    for (int j : columns) {
        if (!check_complete(lhs, rhs, j, rep)) return rep;
        const auto& cl = lhs.cols[j];
        const auto& cr = rhs.cols[j];
        if (cl == cr) continue;  // both pruned of zeros
        int row = -1;
        for (const auto& [r0, v] : cl) {
            auto it = cr.find(r0);
            if (it == cr.end() || !(it->second == v)) {
                row = r0;
                break;
            }
        }
        if (row < 0)
            for (const auto& [r0, v] : cr)
                if (!cl.count(r0)) {
                    row = r0;
                    break;
                }
        rep.pass = false;
        rep.witness_column = j;
        rep.witness_row = row;
        rep.detail = "entry (row " + std::to_string(row) + ", col " + std::to_string(j) +
                     "): lhs " + rat_to_string(lhs.entry(row, j)) + ", rhs " +
                     rat_to_string(rhs.entry(row, j));
        return rep;
    }
    return rep;
}

IdentityReport verify_projected(const SparseOperator& lhs, const SparseOperator& rhs,
                                const std::vector<int>& columns) {
    require_same_basis(lhs, rhs);
    IdentityReport rep;
    for (int j : columns) {
        if (!check_complete(lhs, rhs, j, rep)) return rep;
        Rat sl = lhs.column_sum(j), sr = rhs.column_sum(j);
        if (sl == sr) continue;
        rep.pass = false;
        rep.witness_column = j;
        rep.detail = "column sum at col " + std::to_string(j) + ": lhs " + rat_to_string(sl) +
                     ", rhs " + rat_to_string(sr);
        return rep;
    }
    return rep;
}

void dump_operator_csv(const SparseOperator& op, std::ostream& os) {
    os << "row_key,col_key,numerator,denominator\n";
    const StateBasis& b = *op.basis;
    for (std::size_t j = 0; j < op.cols.size(); ++j)
        for (const auto& [row, v] : op.cols[j])
            os << hex_key(b.keys[row]) << ',' << hex_key(b.keys[j]) << ','
               << v.get_num().get_str() << ',' << v.get_den().get_str() << '\n';
}

std::string basis_manifest_json(const StateBasis& basis) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (int i = 0; i < basis.size(); ++i) {
        nlohmann::ordered_json row;
        row["index"] = i;
        row["key"] = hex_key(basis.keys[i]);
        row["generation"] = basis.generation[i];
        row["vertices"] = basis.reps[i].n_vertices();
        row["edges"] = basis.reps[i].n_edges();
        arr.push_back(std::move(row));
    }
    return arr.dump(2) + "\n";
}

}  // namespace rasm
