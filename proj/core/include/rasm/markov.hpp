#ifndef RASM_MARKOV_HPP
#define RASM_MARKOV_HPP

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "rasm/instances.hpp"
#include "rasm/rng.hpp"
#include "rasm/rule_algebra.hpp"
#include "rasm/species.hpp"

namespace rasm {

// A continuous-time chain specification: positive base rates attached to
// rules, all applied under one rewriting semantics.  The propensity of a
// rule in a state is rate * number of admissible matches.
struct TransitionSet {
    std::vector<WeightedRule> transitions;
    Semantics semantics = Semantics::SqPO;
};

/**
 * Rate matrix on the truncated basis: entry (Y, X) for Y != X is the summed
 * propensity of one-step derivations from X landing in class Y; the diagonal
 * subtracts the column sum, so every column of the returned operator sums to
 * exactly zero.  Columns whose derivations all stay inside the basis are
 * marked complete; only those carry the true exit rate on the diagonal.
 */
SparseOperator build_generator(const TransitionSet& ts,
                               std::shared_ptr<const StateBasis> basis);

/**
 * Jump chain of the rate matrix: each column is the off-diagonal rate column
 * divided by its exit rate, so complete columns sum to exactly one.  States
 * with no moves at all keep their mass through a unit self-loop by default;
 * with absorbing_self_loop = false their columns are left empty and repeated
 * application drains their mass (the literal normalization-by-activity
 * convention).
 */
SparseOperator embedded_dtmc(const TransitionSet& ts,
                             std::shared_ptr<const StateBasis> basis,
                             bool absorbing_self_loop = true);

using StateDistribution = std::map<CanonicalKey, Rat>;

// n-fold application of the column-stochastic operator to the point mass at
// x0, exact.  Throws std::invalid_argument when x0 is outside the basis and
// std::runtime_error when probability mass reaches an incomplete column
// before the last step (the truncation cannot answer the query).
StateDistribution dtmc_propagate(const SparseOperator& dtmc, const TypedGraph& x0, int n);

/**
 * Exact absorption probabilities into the target state for the jump chain:
 * solves p(target) = 1, p(x) = 0 for other absorbing states, and
 * p(x) = sum_y d(y, x) p(y) for transient x by Gaussian elimination over the
 * rationals.  Requires every column to be complete.
 */
std::map<CanonicalKey, Rat> absorption_probabilities(const SparseOperator& dtmc,
                                                     const CanonicalKey& target);

struct TrajectoryPoint {
    double t = 0;
    CanonicalKey state;
    std::vector<Int> counts;  // per tracked observable
};

struct Trajectory {
    std::uint64_t seed = 0;
    bool absorbed = false;  // ended by zero propensity rather than horizon
    std::vector<TrajectoryPoint> points;
};

struct SsaOptions {
    double max_time = std::numeric_limits<double>::infinity();
    long max_steps = -1;  // negative = no step bound; at least one bound required
};

/**
 * Gillespie simulation from x0: per step the total propensity is
 * sum_j rate_j * |matches_j|, the waiting time is exponential with that
 * parameter, and the jump picks a (rule, match) pair with probability
 * proportional to its rate.  The first point is (0, x0); a jump whose time
 * would pass max_time is discarded and the run stops.  Fully reproducible
 * from the seed.
 */
Trajectory ssa_run(const TransitionSet& ts, const TypedGraph& x0, const SsaOptions& opt,
                   std::uint64_t seed, const std::vector<Observable>& tracked = {});

// One JSON object per line: {"t": float, "state": hex key, "counts": {name: int}}.
void export_trajectory_jsonl(const Trajectory& tr, const std::vector<std::string>& names,
                             std::ostream& os);

using CountVector = std::vector<long>;
using CountDistribution = std::map<CountVector, Rat>;

// Weight a0 + sum_i a_i * n_i, exact rational coefficients over the
// observable columns of a CountTable.
struct AffineForm {
    Rat constant;
    std::vector<Rat> coeffs;

    Rat eval(const CountVector& n) const;
};

struct MarginalTransition {
    CountVector delta;
    AffineForm weight;
};

/**
 * A jump chain on count vectors: each transition shifts the counts by its
 * delta with probability weight(n) / normalizer(n).  Valid only if on every
 * reachable count vector the weights are nonnegative and sum to the
 * normalizer; derive_marginal_generator establishes this by construction.
 */
struct MarginalGenerator {
    std::vector<MarginalTransition> transitions;  // sorted by delta
    AffineForm normalizer;                        // sum of the weights
};

/**
 * Projects the state-space jump chain onto pattern counts.  Classifies every
 * single-step derivation from every state of generations < table depth by
 * its count delta, then fits each delta class's multiplicity as an affine
 * function of the state's counts (exact fit via row reduction, free
 * coefficients set to zero, columns ordered constant first then the
 * CountTable columns).  A nonzero residual means the observable set does not
 * close under single steps; that raises std::runtime_error naming witness
 * states.  Requires table depth >= 4.
 */
MarginalGenerator derive_marginal_generator(const GenerationTable& table,
                                            const CountTable& counts,
                                            const TransitionSet& ts);

// n steps of the count-lattice jump chain from c0, exact.  Count vectors
// with zero normalizer hold their mass; a negative weight on a reached
// vector raises std::runtime_error.
CountDistribution marginal_propagate(const MarginalGenerator& mg, const CountVector& c0,
                                     int n);

// Keeps the chosen coordinates (in the given order), summing probabilities.
CountDistribution project_counts(const CountDistribution& dist, const std::vector<int>& keep);

/**
 * Deterministic table of the distribution: one row per count vector in
 * ascending lexicographic order.  format "csv" writes a header
 * `<names...>,probability` and decimal probabilities with 15 significant
 * digits; format "json" writes an array of {counts: {...}, probability:
 * "num/den"} objects with exact values.
 */
void export_distribution(const CountDistribution& dist, const std::vector<std::string>& names,
                         const std::string& format, std::ostream& os);

}  // namespace rasm

#endif
