#ifndef RASM_CONDITION_HPP
#define RASM_CONDITION_HPP

#include <memory>
#include <string>
#include <vector>

#include "rasm/match.hpp"
#include "rasm/typed_graph.hpp"

namespace rasm {

/**
 * Nested application condition over a context graph X.  Grammar:
 *   True | Exists(embed: X -> Y, sub over Y) | Not(sub) | And(subs...)
 * ForAll(embed, sub) is a derived form stored as Not(Exists(embed, Not(sub))).
 * A morphism a: X -> Z satisfies Exists(embed, sub) iff some monomorphism
 * b: Y -> Z with b after embed = a satisfies sub.
 */
struct Condition {
    enum class Kind { True, Exists, Not, And };

    Kind kind = Kind::True;
    // Exists only:
    TypedGraph y;
    Morphism embed;  // X -> y
    // Exists/Not: subs[0]; And: any arity (empty And == True)
    std::vector<Condition> subs;

    static Condition truth() { return Condition{}; }
    static Condition exists(TypedGraph y, Morphism embed);
    static Condition exists(TypedGraph y, Morphism embed, Condition sub);
    static Condition negation(Condition sub);
    static Condition conjunction(std::vector<Condition> subs);
    static Condition forall(TypedGraph y, Morphism embed, Condition sub);
    // Not(And(Not a, Not b, ...)), the derived disjunction
    static Condition disjunction(std::vector<Condition> subs);
};

// Satisfaction of c (over dom(a)) at the monomorphism a: X -> Z.
bool satisfies(const TypedGraph& x, const TypedGraph& z, const Morphism& a, const Condition& c);

// Convenience for conditions over the empty context: satisfaction at the
// unique empty morphism into z.  empty_context must have 0 vertices.
bool satisfies_empty(const TypedGraph& empty_context, const TypedGraph& z, const Condition& c);

// Structural fingerprint: identical construction yields identical strings.
// Used for rule class keys; semantic equivalence is not detected.
std::string condition_fingerprint(const Condition& c);

/**
 * Instance-level structural constraints: a graph is a pattern iff no
 * forbidden graph embeds into it; a state is a pattern whose unique
 * empty-context embedding also satisfies the positive condition.
 */
struct ConstraintSet {
    TypedGraph empty;                  // empty graph over the instance's types
    std::vector<TypedGraph> forbidden; // each nonempty
    Condition positive;                // over `empty`
};

bool is_pattern(const ConstraintSet& cs, const TypedGraph& g);
bool is_state(const ConstraintSet& cs, const TypedGraph& g);

}  // namespace rasm

#endif
