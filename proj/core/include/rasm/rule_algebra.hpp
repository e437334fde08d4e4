#ifndef RASM_RULE_ALGEBRA_HPP
#define RASM_RULE_ALGEBRA_HPP

#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "rasm/canonical.hpp"
#include "rasm/rule.hpp"
#include "rasm/species.hpp"

namespace rasm {

// Canonical byte key of a rule up to isomorphism of the span (compatible
// iso triples on O, K, I), plus the structural condition fingerprint.
// Semantically equivalent but structurally different conditions yield
// different keys.
using RuleClassKey = std::string;

RuleClassKey rule_class_key(const Rule& r);

// Rational linear combination of rule classes.
struct FormalSum {
    struct Term {
        Rat coeff;
        Rule rep;
    };
    std::map<RuleClassKey, Term> terms;

    static FormalSum of(const Rule& r, const Rat& coeff = Rat(1));
    void add(const Rat& coeff, const Rule& r);
    void add_scaled(const FormalSum& other, const Rat& scale);
    bool empty() const { return terms.empty(); }
};

/**
 * Rule-algebra product delta(r2) * delta(r1): one composite per overlap span
 * (S, f) with S a subgraph of r1's output and f a monomorphism of S into
 * r2's input (the empty overlap included).  For each span the gluing N of
 * the two patterns along S must pass the forbidden-subgraph constraints and
 * the reverse application of r1 at N must satisfy the dangling condition;
 * surviving spans contribute their composite rule with multiplicity 1.
 * Composite conditions are True (constraint-preserving reading).
 */
FormalSum compose(const Rule& r2, const Rule& r1, const ConstraintSet& constraints);

// bilinear extension
FormalSum compose(const FormalSum& a, const FormalSum& b, const ConstraintSet& constraints);

// Canonically ordered truncated state space: insertion by generation of
// first appearance, then by key.
struct StateBasis {
    std::vector<CanonicalKey> keys;
    std::vector<TypedGraph> reps;
    std::vector<int> generation;
    std::map<CanonicalKey, int> index;

    int size() const { return static_cast<int>(keys.size()); }
    int find(const CanonicalKey& key) const {
        auto it = index.find(key);
        return it == index.end() ? -1 : it->second;
    }
    // columns whose generation of first appearance is <= max_generation
    std::vector<int> interior(int max_generation) const;
};

StateBasis state_basis(const GenerationTable& table);

// Column-major exact sparse matrix over a shared basis.  col_complete[j]
// records whether every single-step result from column j stayed inside the
// basis; identities are only asserted on complete (interior) columns.
struct SparseOperator {
    std::shared_ptr<const StateBasis> basis;
    std::vector<std::map<int, Rat>> cols;
    std::vector<char> col_complete;

    explicit SparseOperator(std::shared_ptr<const StateBasis> b);
    Rat entry(int row, int col) const;
    Rat column_sum(int col) const;
};

// entry (Y, X) = sum over terms coeff * (number of admissible matches of the
// term's rule in X whose result is isomorphic to Y)
SparseOperator represent(const FormalSum& fs, std::shared_ptr<const StateBasis> basis,
                         Semantics semantics);

SparseOperator scale(const SparseOperator& a, const Rat& c);
SparseOperator add(const SparseOperator& a, const SparseOperator& b);
SparseOperator subtract(const SparseOperator& a, const SparseOperator& b);
SparseOperator product(const SparseOperator& a, const SparseOperator& b);
SparseOperator commutator(const SparseOperator& a, const SparseOperator& b);

struct IdentityReport {
    bool pass = true;
    int witness_column = -1;       // basis index of the first failing column
    int witness_row = -1;          // -1 for projected (column-sum) checks
    std::string detail;
};

// Exact entry-wise equality restricted to the given columns.
IdentityReport verify_identity(const SparseOperator& lhs, const SparseOperator& rhs,
                               const std::vector<int>& columns);

// Row-functional (projected) equality: column sums agree on the given columns.
IdentityReport verify_projected(const SparseOperator& lhs, const SparseOperator& rhs,
                                const std::vector<int>& columns);

// CSV rows (row_key, col_key, numerator, denominator), hex keys, column-major
// deterministic order.
void dump_operator_csv(const SparseOperator& op, std::ostream& os);

// JSON list of {index, key, generation, vertices, edges} in basis order.
std::string basis_manifest_json(const StateBasis& basis);

}  // namespace rasm

#endif
