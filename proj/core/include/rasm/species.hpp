#ifndef RASM_SPECIES_HPP
#define RASM_SPECIES_HPP

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "rasm/canonical.hpp"
#include "rasm/instances.hpp"
#include "rasm/rule.hpp"

namespace rasm {

struct GenerationEntry {
    TypedGraph representative;
    Rat weight;  // sum over length-n derivation sequences of rule-weight products
};

// generations[n] maps canonical key -> entry; generation 0 is the start state
// with weight 1.
struct GenerationTable {
    std::vector<std::map<CanonicalKey, GenerationEntry>> generations;

    int depth() const { return static_cast<int>(generations.size()) - 1; }
    Rat generation_weight(int n) const;  // sum of weights in generation n
};

/**
 * Iterated derive_all from x0, n generations deep.  When state_check is
 * given, every produced representative must satisfy it; a violation raises
 * std::runtime_error naming the offending rule application.
 */
GenerationTable expand(const std::vector<WeightedRule>& rules, const TypedGraph& x0, int n,
                       Semantics semantics, const ConstraintSet* state_check = nullptr);

// Rows follow the observable list order; keyed by state canonical key.
using CountTable = std::map<CanonicalKey, std::vector<Int>>;

CountTable count_patterns(const GenerationTable& table, const std::vector<Observable>& observables);

// n-th coefficient of the joint moment EGF: sum over generation-n states of
// weight * prod_i count_i^powers_i.
Rat egf_moment(const GenerationTable& table, const CountTable& counts, int n,
               const std::vector<unsigned>& powers);

/**
 * All connected patterns over the constraint set's type graph, up to iso:
 * nonempty, every subgraph extension step passes the forbidden-subgraph
 * check, at most max_out_vertices vertices with out-edges, at most max_edges
 * edges.  Sorted by (vertex count, edge count, canonical key).
 */
std::vector<TypedGraph> pattern_candidates(const ConstraintSet& constraints, int max_out_vertices,
                                           int max_edges);

/**
 * An affine relation pinning the count function of one unknown pattern slot:
 * for every state X,
 *   sum_Y (N_lhs(Y) - N_lhs(X)) * G(Y,X)
 *     = lambda_coeff * Lambda(X) + constant
 *       + sum (coeff, slot)  * N_slot(X)
 *       + sum (coeff, known) * N_known(X)
 * where G(Y,X) are the single-step class weights from X and Lambda(X) their
 * total.
 */
struct DiscoveryRelation {
    int lhs_slot = 0;
    Rat lambda_coeff = 0;
    Rat constant = 0;
    std::vector<std::pair<Rat, int>> slot_terms;
    std::vector<std::pair<Rat, int>> known_terms;
};

/**
 * Exhaustive search for slot assignments (one candidate index per slot)
 * satisfying every relation on all states of generations <= assert_through;
 * the table must extend one generation deeper so successor counts exist.
 * Assignments are returned in lexicographic candidate-index order.
 */
std::vector<std::vector<int>> discover_patterns(const GenerationTable& table, int assert_through,
                                                const std::vector<WeightedRule>& rules,
                                                const std::vector<TypedGraph>& candidates,
                                                const std::vector<Observable>& known,
                                                const std::vector<DiscoveryRelation>& relations,
                                                int n_slots);

}  // namespace rasm

#endif
