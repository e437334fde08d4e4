#include "rasm/species.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

#include "rasm/match.hpp"
#include "rasm/parallel.hpp"

namespace rasm {

Rat GenerationTable::generation_weight(int n) const {
    Rat total = 0;
    for (const auto& [key, entry] : generations.at(n)) total += entry.weight;
    return total;
}

GenerationTable expand(const std::vector<WeightedRule>& rules, const TypedGraph& x0, int n,
                       Semantics semantics, const ConstraintSet* state_check) {
    if (n < 0) throw std::invalid_argument("expand: negative depth");
    if (state_check && !is_state(*state_check, x0))
        throw std::runtime_error("expand: start graph fails the state check");
    GenerationTable table;
    std::map<CanonicalKey, GenerationEntry> gen0;
    gen0.emplace(canonical_key(x0), GenerationEntry{x0, Rat(1)});
    table.generations.push_back(std::move(gen0));

    for (int g = 0; g < n; ++g) {
        const auto& cur = table.generations.back();
        std::vector<const GenerationEntry*> items;
        items.reserve(cur.size());
        for (const auto& [key, entry] : cur) items.push_back(&entry);
        std::vector<std::map<CanonicalKey, DerivedClass>> derived(items.size());
        parallel_for(items.size(), [&](size_t idx) {
            derived[idx] = derive_all(rules, items[idx]->representative, semantics);
        });

        std::map<CanonicalKey, GenerationEntry> next;
        for (size_t idx = 0; idx < items.size(); ++idx) {
            for (auto& [key, cls] : derived[idx]) {
                auto it = next.find(key);
                if (it != next.end()) {
                    it->second.weight += items[idx]->weight * cls.weight;
                    continue;
                }
                if (state_check && !is_state(*state_check, cls.representative))
                    throw std::runtime_error(
                        "expand: derivation left the state space at generation " +
                        std::to_string(g + 1));
                next.emplace(key,
                             GenerationEntry{std::move(cls.representative),
                                             items[idx]->weight * cls.weight});
            }
        }
        table.generations.push_back(std::move(next));
    }
    return table;
}

CountTable count_patterns(const GenerationTable& table,
                          const std::vector<Observable>& observables) {
    std::vector<const CanonicalKey*> keys;
    std::vector<const TypedGraph*> reps;
    CountTable out;
    for (const auto& gen : table.generations) {
        for (const auto& [key, entry] : gen) {
            if (out.emplace(key, std::vector<Int>()).second) {
                keys.push_back(&key);
                reps.push_back(&entry.representative);
            }
        }
    }
    std::vector<std::vector<Int>> counts(keys.size());
    parallel_for(keys.size(), [&](size_t idx) {
        counts[idx].reserve(observables.size());
        for (const auto& obs : observables) counts[idx].push_back(observable_count(obs, *reps[idx]));
    });
    for (size_t idx = 0; idx < keys.size(); ++idx) out[*keys[idx]] = std::move(counts[idx]);
    return out;
}

Rat egf_moment(const GenerationTable& table, const CountTable& counts, int n,
               const std::vector<unsigned>& powers) {
    Rat total = 0;
    for (const auto& [key, entry] : table.generations.at(n)) {
        const auto& row = counts.at(key);
        if (powers.size() > row.size())
            throw std::invalid_argument("egf_moment: more powers than observables");
        Rat term = entry.weight;
        for (size_t i = 0; i < powers.size(); ++i) {
            if (powers[i] == 0) continue;
            Int p;
            mpz_pow_ui(p.get_mpz_t(), row[i].get_mpz_t(), powers[i]);
            term *= p;
        }
        total += term;
    }
    return total;
}

namespace {

int out_vertex_count(const TypedGraph& g) {
    int c = 0;
    for (int v = 0; v < g.n_vertices(); ++v)
        if (!g.out_edges(v).empty()) ++c;
    return c;
}

}  // namespace

std::vector<TypedGraph> pattern_candidates(const ConstraintSet& constraints, int max_out_vertices,
                                           int max_edges) {
    const auto& tg = constraints.empty.types_ptr();
    std::map<CanonicalKey, TypedGraph> seen;
    std::vector<TypedGraph> frontier;
    for (int vt = 0; vt < static_cast<int>(tg->vertex_types.size()); ++vt) {
        TypedGraph g(tg);
        g.add_vertex("v0", vt);
        if (!is_pattern(constraints, g)) continue;
        if (seen.emplace(canonical_key(g), g).second) frontier.push_back(g);
    }

    while (!frontier.empty()) {
        std::vector<TypedGraph> next;
        for (const auto& g : frontier) {
            if (g.n_edges() >= max_edges) continue;
            std::vector<TypedGraph> extensions;
            std::string eid = "e" + std::to_string(g.n_edges());
            std::string vid = "v" + std::to_string(g.n_vertices());
            for (int t = 0; t < static_cast<int>(tg->edge_types.size()); ++t) {
                const auto& et = tg->edge_types[t];
                for (int s = 0; s < g.n_vertices(); ++s) {
                    if (g.vertex(s).type != et.src) continue;
                    for (int d = 0; d < g.n_vertices(); ++d) {
                        if (g.vertex(d).type != et.tgt) continue;
                        TypedGraph h = g;
                        h.add_edge(eid, t, s, d);
                        extensions.push_back(std::move(h));
                    }
                    TypedGraph h = g;
                    h.add_edge(eid, t, s, h.add_vertex(vid, et.tgt));
                    extensions.push_back(std::move(h));
                }
                for (int d = 0; d < g.n_vertices(); ++d) {
                    if (g.vertex(d).type != et.tgt) continue;
                    TypedGraph h = g;
                    h.add_edge(eid, t, h.add_vertex(vid, et.src), d);
                    extensions.push_back(std::move(h));
                }
            }
            for (auto& h : extensions) {
                if (out_vertex_count(h) > max_out_vertices) continue;
                if (!is_pattern(constraints, h)) continue;
                CanonicalKey key = canonical_key(h);
                if (seen.emplace(key, h).second) next.push_back(std::move(h));
            }
        }
        frontier = std::move(next);
    }

    std::vector<std::pair<CanonicalKey, const TypedGraph*>> order;
    order.reserve(seen.size());
    for (const auto& [key, g] : seen) order.emplace_back(key, &g);
    std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
        if (a.second->n_vertices() != b.second->n_vertices())
            return a.second->n_vertices() < b.second->n_vertices();
        if (a.second->n_edges() != b.second->n_edges())
            return a.second->n_edges() < b.second->n_edges();
        return a.first < b.first;
    });
    std::vector<TypedGraph> out;
    out.reserve(order.size());
    for (const auto& [key, g] : order) out.push_back(*g);
    return out;
}

std::vector<std::vector<int>> discover_patterns(const GenerationTable& table, int assert_through,
                                                const std::vector<WeightedRule>& rules,
                                                const std::vector<TypedGraph>& candidates,
                                                const std::vector<Observable>& known,
                                                const std::vector<DiscoveryRelation>& relations,
                                                int n_slots) {
    if (assert_through + 1 > table.depth())
        throw std::invalid_argument("discover_patterns: table must extend one generation past "
                                    "the asserted range");

    // unique graphs whose counts are needed: states of generations
    // <= assert_through + 1 (successors land there)
    std::map<CanonicalKey, int> graph_index;
    std::vector<const TypedGraph*> graphs;
    for (int g = 0; g <= assert_through + 1; ++g) {
        for (const auto& [key, entry] : table.generations[g]) {
            if (graph_index.emplace(key, static_cast<int>(graphs.size())).second)
                graphs.push_back(&entry.representative);
        }
    }

    // asserted states with their single-step class weights
    struct StateData {
        int graph = 0;                            // index into graphs
        Rat lambda = 0;                           // total outgoing weight
        std::vector<std::pair<int, Rat>> succs;   // (graph index, weight)
    };
    std::vector<StateData> states;
    for (int g = 0; g <= assert_through; ++g) {
        for (const auto& [key, entry] : table.generations[g]) {
            StateData sd;
            sd.graph = graph_index.at(key);
            for (auto& [skey, cls] : derive_all(rules, entry.representative, Semantics::SqPO)) {
                auto it = graph_index.find(skey);
                if (it == graph_index.end())
                    throw std::logic_error("discover_patterns: successor missing from table");
                sd.succs.emplace_back(it->second, cls.weight);
                sd.lambda += cls.weight;
            }
            states.push_back(std::move(sd));
        }
    }

    // count matrices: candidates x graphs, known observables x graphs
    std::vector<std::vector<Int>> cand_counts(candidates.size(),
                                              std::vector<Int>(graphs.size()));
    parallel_for(graphs.size(), [&](size_t gi) {
        for (size_t c = 0; c < candidates.size(); ++c)
            cand_counts[c][gi] = Int(static_cast<long>(count_monos(candidates[c], *graphs[gi])));
    });
    std::vector<std::vector<Int>> known_counts(known.size(), std::vector<Int>(graphs.size()));
    parallel_for(graphs.size(), [&](size_t gi) {
        for (size_t k = 0; k < known.size(); ++k)
            known_counts[k][gi] = observable_count(known[k], *graphs[gi]);
    });

    // commutator row sums per candidate and state:
    //   D_c(X) = sum_Y N_c(Y) w(Y,X) - N_c(X) Lambda(X)
    std::vector<std::vector<Rat>> drift(candidates.size(), std::vector<Rat>(states.size()));
    parallel_for(candidates.size(), [&](size_t c) {
        for (size_t s = 0; s < states.size(); ++s) {
            Rat d = 0;
            for (const auto& [succ, w] : states[s].succs) d += Rat(cand_counts[c][succ]) * w;
            d -= Rat(cand_counts[c][states[s].graph]) * states[s].lambda;
            drift[c][s] = d;
        }
    });

    // a relation is decided once its latest-referenced slot is assigned
    std::vector<std::vector<const DiscoveryRelation*>> due(n_slots);
    for (const auto& rel : relations) {
        int latest = rel.lhs_slot;
        for (const auto& [coeff, slot] : rel.slot_terms) latest = std::max(latest, slot);
        if (rel.lhs_slot < 0 || latest >= n_slots)
            throw std::invalid_argument("discover_patterns: relation references a bad slot");
        due[latest].push_back(&rel);
    }

    std::vector<std::vector<int>> found;
    std::vector<int> assign(n_slots, -1);
    auto holds = [&](const DiscoveryRelation& rel) {
        for (size_t s = 0; s < states.size(); ++s) {
            Rat rhs = rel.constant + rel.lambda_coeff * states[s].lambda;
            for (const auto& [coeff, slot] : rel.slot_terms)
                rhs += coeff * Rat(cand_counts[assign[slot]][states[s].graph]);
            for (const auto& [coeff, kn] : rel.known_terms)
                rhs += coeff * Rat(known_counts[kn][states[s].graph]);
            if (drift[assign[rel.lhs_slot]][s] != rhs) return false;
        }
        return true;
    };
    std::function<void(int)> search = [&](int slot) {
        if (slot == n_slots) {
            found.push_back(assign);
            return;
        }
        for (size_t c = 0; c < candidates.size(); ++c) {
            assign[slot] = static_cast<int>(c);
            bool ok = true;
            for (const auto* rel : due[slot])
                if (!holds(*rel)) {
                    ok = false;
                    break;
                }
            if (ok) search(slot + 1);
        }
        assign[slot] = -1;
    };
    search(0);
    return found;
}

}  // namespace rasm
