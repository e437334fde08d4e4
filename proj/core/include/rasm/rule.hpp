#ifndef RASM_RULE_HPP
#define RASM_RULE_HPP

#include <map>
#include <string>
#include <vector>

#include "rasm/canonical.hpp"
#include "rasm/condition.hpp"
#include "rasm/rational.hpp"
#include "rasm/typed_graph.hpp"

namespace rasm {

enum class Semantics { SqPO, DPO };

/**
 * Monic rewrite rule: a span  O <-ko- K -ki-> I  of monomorphisms plus an
 * application condition over the input graph I.  Reading direction: matches
 * are found in the host for I, the interface K is preserved, O is produced.
 */
struct Rule {
    std::string name;
    TypedGraph o, k, i;
    Morphism ko;  // K -> O
    Morphism ki;  // K -> I
    Condition condition;  // over I

    Rule(std::string name_, TypedGraph o_, TypedGraph k_, TypedGraph i_, Morphism ko_,
         Morphism ki_, Condition condition_ = Condition::truth());

    // P <- P -> P with identity embeddings; matches count occurrences of p.
    static Rule identity(std::string name, TypedGraph p, Condition condition = Condition::truth());
};

struct WeightedRule {
    Rat weight;
    Rule rule;
};

struct DirectDerivation {
    std::string rule_name;
    Morphism match;    // I -> host
    TypedGraph result;
    Morphism comatch;  // O -> result
    Semantics semantics = Semantics::SqPO;
    // where each host vertex/edge ended up; -1 for deleted material
    std::vector<int> host_v_map, host_e_map;
};

// True for rules of shape P <- P -> P with identity embeddings.
bool is_identity_rule(const Rule& r);

// Condition satisfaction at the match (no dangling check).
bool match_satisfies_condition(const Rule& r, const TypedGraph& host, const Morphism& m);

// DPO admissibility: condition holds and every host edge incident to a
// deleted vertex is itself deleted by the rule (dangling condition).  The
// identification condition is vacuous because matches are monic.
bool dpo_admissible(const Rule& r, const TypedGraph& host, const Morphism& m);

/**
 * One direct derivation at a monic match m: I -> host.
 *
 * SqPO: delete the images of I minus K (vertices and edges) together with
 * every host edge incident to a deleted vertex (side-effect deletion), then
 * glue in O minus K along the preserved interface.  DPO is identical but
 * refuses matches that would need side-effect deletion.
 *
 * Kept host vertices and edges retain their ids and relative order; new
 * material gets fresh ids "f0", "f1", ... (skipping ids present in the host)
 * in O's declaration order, so results are deterministic.
 *
 * Throws std::invalid_argument if m is not a monomorphism, the condition
 * fails, or (DPO) the dangling condition fails.
 */
DirectDerivation apply(const Rule& r, const TypedGraph& host, const Morphism& m,
                       Semantics semantics);

// All monic matches passing the condition (and, for DPO, the dangling
// check), in the deterministic order of enumerate_monos.
std::vector<Morphism> admissible_matches(const Rule& r, const TypedGraph& host,
                                         Semantics semantics);

Int count_matches(const Rule& r, const TypedGraph& host, Semantics semantics);

struct DerivedClass {
    Rat weight;  // sum of rule weights over matches landing in this class
    TypedGraph representative;
};

// Apply every admissible match of every rule and fold the results by
// canonical form, accumulating weight * multiplicity per class.
std::map<CanonicalKey, DerivedClass> derive_all(const std::vector<WeightedRule>& rules,
                                                const TypedGraph& state, Semantics semantics);

}  // namespace rasm

#endif
