#ifndef RASM_MATCH_HPP
#define RASM_MATCH_HPP

#include <functional>
#include <vector>

#include "rasm/typed_graph.hpp"

namespace rasm {

// Optional pre-assignments (host indices, -1 for free); used to search for
// extensions of a partial embedding, e.g. in condition satisfaction.
struct MonoSpec {
    std::vector<int> fix_v;
    std::vector<int> fix_e;
};

/**
 * Enumerates monomorphisms pattern -> host by backtracking, assigning the
 * most-constrained pattern vertex first (most already-assigned neighbors,
 * lowest index as tie-break).  Parallel edges are matched injectively, so
 * k parallel pattern edges against m parallel host edges contribute
 * m!/(m-k)! matches.  Visit order is deterministic; enumerate_monos
 * returns matches sorted lexicographically by vertex then edge images.
 */
void for_each_mono(const TypedGraph& pattern, const TypedGraph& host, const MonoSpec* spec,
                   const std::function<bool(const Morphism&)>& visit);  // return false to stop

std::vector<Morphism> enumerate_monos(const TypedGraph& pattern, const TypedGraph& host,
                                      const MonoSpec* spec = nullptr);

// Match count without materializing edge assignments (falling-factorial
// shortcut per parallel class); equals enumerate_monos(...).size().
long long count_monos(const TypedGraph& pattern, const TypedGraph& host,
                      const MonoSpec* spec = nullptr);

}  // namespace rasm

#endif
