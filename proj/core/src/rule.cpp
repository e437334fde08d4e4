#include "rasm/rule.hpp"

#include <stdexcept>
#include <unordered_set>

#include "rasm/match.hpp"

namespace rasm {

namespace {

std::vector<int> inverse_of(const std::vector<int>& m, int cod_size) {
    std::vector<int> inv(cod_size, -1);
    for (int d = 0; d < static_cast<int>(m.size()); ++d) inv[m[d]] = d;
    return inv;
}

void require_mono(const TypedGraph& dom, const TypedGraph& cod, const Morphism& m,
                  const std::string& what) {
    std::string why;
    if (!is_monomorphism(dom, cod, m, &why))
        throw std::invalid_argument(what + " is not a monomorphism: " + why);
}

// Host-side deletion sets for a match m: I -> host.  side_effects reports
// whether any host edge outside the matched deleted edges touches a deleted
// vertex (the edges SqPO removes implicitly and DPO rejects).
struct Deletions {
    std::vector<char> vertex, edge;  // host-indexed flags
    bool side_effects = false;
};

Deletions deletions_at(const Rule& r, const TypedGraph& host, const Morphism& m) {
    Deletions d;
    d.vertex.assign(host.n_vertices(), 0);
    d.edge.assign(host.n_edges(), 0);
    std::vector<int> ki_v_inv = inverse_of(r.ki.v, r.i.n_vertices());
    std::vector<int> ki_e_inv = inverse_of(r.ki.e, r.i.n_edges());
    for (int iv = 0; iv < r.i.n_vertices(); ++iv)
        if (ki_v_inv[iv] < 0) d.vertex[m.v[iv]] = 1;
    for (int ie = 0; ie < r.i.n_edges(); ++ie)
        if (ki_e_inv[ie] < 0) d.edge[m.e[ie]] = 1;
    for (int he = 0; he < host.n_edges(); ++he) {
        if (d.edge[he]) continue;
        if (d.vertex[host.edge(he).src] || d.vertex[host.edge(he).tgt]) {
            d.edge[he] = 1;
            d.side_effects = true;
        }
    }
    return d;
}

}  // namespace

Rule::Rule(std::string name_, TypedGraph o_, TypedGraph k_, TypedGraph i_, Morphism ko_,
           Morphism ki_, Condition condition_)
    : name(std::move(name_)),
      o(std::move(o_)),
      k(std::move(k_)),
      i(std::move(i_)),
      ko(std::move(ko_)),
      ki(std::move(ki_)),
      condition(std::move(condition_)) {
    if (!(o.types() == k.types()) || !(k.types() == i.types()))
        throw std::invalid_argument("rule '" + name + "': graphs disagree on the type graph");
    require_mono(k, o, ko, "rule '" + name + "': ko");
    require_mono(k, i, ki, "rule '" + name + "': ki");
}

Rule Rule::identity(std::string name, TypedGraph p, Condition condition) {
    Morphism id = Morphism::identity(p);
    TypedGraph copy = p;
    return Rule(std::move(name), std::move(copy), p, p, id, id, std::move(condition));
}

bool match_satisfies_condition(const Rule& r, const TypedGraph& host, const Morphism& m) {
    return satisfies(r.i, host, m, r.condition);
}

bool dpo_admissible(const Rule& r, const TypedGraph& host, const Morphism& m) {
    if (!match_satisfies_condition(r, host, m)) return false;
    return !deletions_at(r, host, m).side_effects;
}

DirectDerivation apply(const Rule& r, const TypedGraph& host, const Morphism& m,
                       Semantics semantics) {
    require_mono(r.i, host, m, "apply: match");
    if (!match_satisfies_condition(r, host, m))
        throw std::invalid_argument("apply: match violates the rule condition");
    Deletions del = deletions_at(r, host, m);
    if (semantics == Semantics::DPO && del.side_effects)
        throw std::invalid_argument("apply: dangling condition fails under DPO semantics");

    TypedGraph result(host.types_ptr());
    std::vector<int> host_v_new(host.n_vertices(), -1);
    std::vector<int> host_e_new(host.n_edges(), -1);
    std::unordered_set<std::string> used_v, used_e;
    for (int hv = 0; hv < host.n_vertices(); ++hv) {
        if (del.vertex[hv]) continue;
        host_v_new[hv] = result.add_vertex(host.vertex(hv).id, host.vertex(hv).type);
        used_v.insert(host.vertex(hv).id);
    }
    for (int he = 0; he < host.n_edges(); ++he) {
        if (del.edge[he]) continue;
        const Edge& e = host.edge(he);
        host_e_new[he] = result.add_edge(e.id, e.type, host_v_new[e.src], host_v_new[e.tgt]);
        used_e.insert(e.id);
    }

    std::vector<int> ko_v_inv = inverse_of(r.ko.v, r.o.n_vertices());
    std::vector<int> ko_e_inv = inverse_of(r.ko.e, r.o.n_edges());
    Morphism comatch;
    comatch.v.assign(r.o.n_vertices(), -1);
    comatch.e.assign(r.o.n_edges(), -1);

    int counter = 0;
    auto fresh = [&counter](const std::unordered_set<std::string>& used) {
        std::string id;
        do {
            id = "f" + std::to_string(counter++);
        } while (used.count(id));
        return id;
    };

    for (int ov = 0; ov < r.o.n_vertices(); ++ov) {
        int kv = ko_v_inv[ov];
        if (kv >= 0) {
            comatch.v[ov] = host_v_new[m.v[r.ki.v[kv]]];
        } else {
            comatch.v[ov] = result.add_vertex(fresh(used_v), r.o.vertex(ov).type);
        }
    }
    for (int oe = 0; oe < r.o.n_edges(); ++oe) {
        int ke = ko_e_inv[oe];
        if (ke >= 0) {
            comatch.e[oe] = host_e_new[m.e[r.ki.e[ke]]];
        } else {
            const Edge& e = r.o.edge(oe);
            comatch.e[oe] =
                result.add_edge(fresh(used_e), e.type, comatch.v[e.src], comatch.v[e.tgt]);
        }
    }

    DirectDerivation dd;
    dd.rule_name = r.name;
    dd.match = m;
    dd.result = std::move(result);
    dd.comatch = std::move(comatch);
    dd.semantics = semantics;
    dd.host_v_map = std::move(host_v_new);
    dd.host_e_map = std::move(host_e_new);
    return dd;
}

bool is_identity_rule(const Rule& r) {
    int nv = r.k.n_vertices(), ne = r.k.n_edges();
    if (r.o.n_vertices() != nv || r.i.n_vertices() != nv) return false;
    if (r.o.n_edges() != ne || r.i.n_edges() != ne) return false;
    for (int v = 0; v < nv; ++v) {
        if (r.ko.v[v] != v || r.ki.v[v] != v) return false;
        if (r.o.vertex(v).type != r.k.vertex(v).type) return false;
        if (r.i.vertex(v).type != r.k.vertex(v).type) return false;
    }
    for (int e = 0; e < ne; ++e) {
        if (r.ko.e[e] != e || r.ki.e[e] != e) return false;
    }
    return true;
}

std::vector<Morphism> admissible_matches(const Rule& r, const TypedGraph& host,
                                         Semantics semantics) {
    std::vector<Morphism> out;
    for (const auto& m : enumerate_monos(r.i, host)) {
        if (!match_satisfies_condition(r, host, m)) continue;
        if (semantics == Semantics::DPO && deletions_at(r, host, m).side_effects) continue;
        out.push_back(m);
    }
    return out;
}

Int count_matches(const Rule& r, const TypedGraph& host, Semantics semantics) {
    // Unconditional SqPO rules never reject a mono, so counting suffices.
    if (r.condition.kind == Condition::Kind::True && semantics == Semantics::SqPO)
        return Int(static_cast<long>(count_monos(r.i, host)));
    return Int(static_cast<long>(admissible_matches(r, host, semantics).size()));
}

std::map<CanonicalKey, DerivedClass> derive_all(const std::vector<WeightedRule>& rules,
                                                const TypedGraph& state, Semantics semantics) {
    std::map<CanonicalKey, DerivedClass> classes;
    for (const auto& wr : rules) {
        for (const auto& m : admissible_matches(wr.rule, state, semantics)) {
            DirectDerivation dd = apply(wr.rule, state, m, semantics);
            CanonicalKey key = canonical_form(dd.result).key;
            auto it = classes.find(key);
            if (it == classes.end()) {
                classes.emplace(std::move(key), DerivedClass{wr.weight, std::move(dd.result)});
            } else {
                it->second.weight += wr.weight;
            }
        }
    }
    return classes;
}

}  // namespace rasm
