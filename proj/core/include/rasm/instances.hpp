#ifndef RASM_INSTANCES_HPP
#define RASM_INSTANCES_HPP

#include <memory>
#include <string>
#include <vector>

#include "rasm/condition.hpp"
#include "rasm/rational.hpp"
#include "rasm/rule.hpp"
#include "rasm/type_graph.hpp"
#include "rasm/typed_graph.hpp"

namespace rasm {

// A pattern-count observable: a sum of identity rules.  Its value on a graph
// is the number of condition-satisfying monomorphisms, summed over parts.
struct Observable {
    std::string name;
    std::vector<Rule> parts;  // identity rules
};

Int observable_count(const Observable& o, const TypedGraph& g);

/**
 * Planar rooted binary trees encoded as typed graphs: one vertex type
 * "node"; edge types I (anchor to tree root), L, R (child edges).  The
 * smallest state is anchor -I-> leaf.  Internal vertices have exactly one L
 * and one R out-edge; every vertex has in-degree at most 1.
 */
struct PRBTSystem {
    std::shared_ptr<const TypeGraph> type_graph;
    ConstraintSet constraints;
    std::vector<WeightedRule> rules;        // 6 edge-splitting rules, unit weight
    std::vector<Observable> observables;    // E, P1, P2, P3
};

// The two splitting moves, one per edge type: replace u -T-> v by
// u -T-> w -R-> v with a fresh leaf as L-child of w ("L" family), or
// u -T-> w -L-> v with the fresh leaf as R-child ("R" family).
PRBTSystem make_remy_system();

struct DiscoveryRelation;

// The drift relations that pin the P1/P2/P3 counts, in slot order, for use
// with species::discover_patterns over pattern_candidates(constraints, 3, 6).
// The shipped observables are the lexicographically first assignment.
std::vector<DiscoveryRelation> prbt_discovery_relations();

// anchor -I-> leaf, the unique 0-internal-vertex state
TypedGraph make_initial_tree(const std::shared_ptr<const TypeGraph>& types);

// Full structural state check used as a test oracle (subsumes the
// first-order ConstraintSet and adds acyclicity, which the constraint
// language cannot express): in-degree <= 1; out-edge multiset of every
// vertex is {}, {I} or {L,R}; sources of I-edges have in-degree 0; no
// parallel edges; every connected component is a tree with exactly one
// I-edge.
bool is_prbf_state_structural(const TypedGraph& g);

// Vertex-only graphs with a birth rule (empty input, one fresh vertex) and a
// death rule (delete one vertex).  with_condition gates birth on the host
// having at least three vertices.
struct BirthDeathSystem {
    std::shared_ptr<const TypeGraph> type_graph;
    ConstraintSet constraints;  // no forbidden graphs, positive condition true
    std::vector<WeightedRule> rules;  // birth, death
};

BirthDeathSystem make_birth_death(bool with_condition);

TypedGraph make_vertices(const std::shared_ptr<const TypeGraph>& types, int n);

struct ReferenceValues {
    Int g_n;        // (2n)!/n!, the total generation weight
    Int catalan_n;  // number of distinct trees with n internal vertices
    long edges_n;   // 2n+1, edge count of every such tree
};

ReferenceValues reference_values(int n);

}  // namespace rasm

#endif
