#ifndef RASM_CANONICAL_HPP
#define RASM_CANONICAL_HPP

#include <string>
#include <vector>

#include "rasm/typed_graph.hpp"

namespace rasm {

// Opaque byte string; equal exactly for isomorphic graphs over the same
// TypeGraph.  Use hex_key for display and serialization.
using CanonicalKey = std::string;

struct CanonicalForm {
    CanonicalKey key;
    std::vector<int> vertex_order;  // canonical position -> original vertex index
    std::vector<int> edge_order;
};

/**
 * Canonical form by iterative color refinement (vertex type plus in/out
 * degree profile per edge type, iterated to a stable partition) with
 * backtracking individualization over the remaining non-singleton cells.
 * The certificate is the lexicographically least relabeled edge list over
 * all branches, so key equality decides isomorphism.
 */
CanonicalForm canonical_form(const TypedGraph& g);

CanonicalKey canonical_key(const TypedGraph& g);

bool is_isomorphic(const TypedGraph& a, const TypedGraph& b);

std::string hex_key(const CanonicalKey& k);
CanonicalKey key_from_hex(const std::string& hex);

}  // namespace rasm

#endif
