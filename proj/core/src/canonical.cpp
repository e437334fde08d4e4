#include "rasm/canonical.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <tuple>

namespace rasm {

namespace {

// One refinement round: signature of v = (color, sorted multiset of
// (direction, edge type, neighbor color)).  New colors are dense ranks of
// the sorted distinct signatures, so they are iso-invariant.
using Sig = std::vector<std::int64_t>;

void refine(const TypedGraph& g, std::vector<int>& color) {
    const int n = g.n_vertices();
    if (n == 0) return;
    for (;;) {
        std::vector<Sig> sigs(n);
        for (int v = 0; v < n; ++v) {
            Sig s;
            s.push_back(color[v]);
            std::vector<std::int64_t> inc;
            for (int e : g.out_edges(v))
                inc.push_back((1ll << 40) | (std::int64_t{g.edge(e).type} << 20) | color[g.edge(e).tgt]);
            for (int e : g.in_edges(v))
                inc.push_back((2ll << 40) | (std::int64_t{g.edge(e).type} << 20) | color[g.edge(e).src]);
            std::sort(inc.begin(), inc.end());
            s.insert(s.end(), inc.begin(), inc.end());
            sigs[v] = std::move(s);
        }
        std::map<Sig, int> rank;
        for (const auto& s : sigs) rank.emplace(s, 0);
        int r = 0;
        for (auto& [sig, rk] : rank) rk = r++;

        std::vector<int> old_sorted = color;
        std::sort(old_sorted.begin(), old_sorted.end());
        int distinct_old = static_cast<int>(
            std::unique(old_sorted.begin(), old_sorted.end()) - old_sorted.begin());

        for (int v = 0; v < n; ++v) color[v] = rank[sigs[v]];
        // the signature starts with the old color, so the new partition
        // refines the old one; equal cell counts means it is stable
        if (static_cast<int>(rank.size()) == distinct_old) break;
        if (static_cast<int>(rank.size()) == n) break;
    }
}

int first_non_singleton(const std::vector<int>& color, int n) {
    // smallest color value whose cell has >= 2 members; returns -1 if discrete
    std::vector<int> count(n, 0);
    for (int c : color) ++count[c];
    for (int c = 0; c < n; ++c)
        if (count[c] >= 2) return c;
    return -1;
}

void append_u16(std::string& out, unsigned v) {
    out.push_back(static_cast<char>((v >> 8) & 0xFF));
    out.push_back(static_cast<char>(v & 0xFF));
}

void append_u64(std::string& out, std::uint64_t v) {
    for (int i = 7; i >= 0; --i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

struct Best {
    bool have = false;
    CanonicalKey cert;
    std::vector<int> order;  // canonical position -> vertex index
};

// Certificate for a discrete coloring: vertex types in canonical order,
// then the relabeled edge multiset sorted lexicographically.
void emit(const TypedGraph& g, const std::vector<int>& color, Best& best) {
    const int n = g.n_vertices();
    std::vector<int> order(n);
    for (int v = 0; v < n; ++v) order[color[v]] = v;
    std::vector<int> pos(n);
    for (int p = 0; p < n; ++p) pos[order[p]] = p;

    std::string cert;
    cert.reserve(4 + 2 * n + 6 * g.n_edges());
    append_u16(cert, static_cast<unsigned>(n));
    append_u16(cert, static_cast<unsigned>(g.n_edges()));
    for (int p = 0; p < n; ++p) append_u16(cert, static_cast<unsigned>(g.vertex(order[p]).type));
    std::vector<std::array<int, 3>> rel;
    rel.reserve(g.n_edges());
    for (int e = 0; e < g.n_edges(); ++e)
        rel.push_back({g.edge(e).type, pos[g.edge(e).src], pos[g.edge(e).tgt]});
    std::sort(rel.begin(), rel.end());
    for (const auto& t : rel) {
        append_u16(cert, static_cast<unsigned>(t[0]));
        append_u16(cert, static_cast<unsigned>(t[1]));
        append_u16(cert, static_cast<unsigned>(t[2]));
    }
    if (!best.have || cert < best.cert) {
        best.have = true;
        best.cert = std::move(cert);
        best.order = std::move(order);
    }
}

void search(const TypedGraph& g, std::vector<int> color, Best& best) {
    refine(g, color);
    const int n = g.n_vertices();
    int cell = n == 0 ? -1 : first_non_singleton(color, n);
    if (cell < 0) {
        emit(g, color, best);
        return;
    }
    for (int v = 0; v < n; ++v) {
        if (color[v] != cell) continue;
        std::vector<int> branched = color;
        branched[v] = n;  // fresh color, re-ranked by the next refine
        search(g, std::move(branched), best);
    }
}

}  // namespace

CanonicalForm canonical_form(const TypedGraph& g) {
    const int n = g.n_vertices();
    Best best;
    if (n == 0) {
        best.have = true;
        append_u16(best.cert, 0);
        append_u16(best.cert, 0);
    } else {
        std::vector<int> color(n);
        for (int v = 0; v < n; ++v) color[v] = g.vertex(v).type;
        search(g, std::move(color), best);
    }

    CanonicalForm cf;
    cf.key.reserve(best.cert.size() + 9);
    cf.key.push_back('\x01');  // format version
    append_u64(cf.key, g.types_ptr() ? g.types().fingerprint() : 0);
    cf.key += best.cert;
    cf.vertex_order = best.order;

    // Edge order: canonical sort with the original id as a deterministic
    // tie-break between parallel edges (which the certificate cannot and
    // need not distinguish).
    std::vector<int> pos(n);
    for (int p = 0; p < n; ++p) pos[cf.vertex_order[p]] = p;
    cf.edge_order.resize(g.n_edges());
    for (int e = 0; e < g.n_edges(); ++e) cf.edge_order[e] = e;
    std::sort(cf.edge_order.begin(), cf.edge_order.end(), [&](int a, int b) {
        const Edge& ea = g.edge(a);
        const Edge& eb = g.edge(b);
        if (ea.type != eb.type) return ea.type < eb.type;
        if (pos[ea.src] != pos[eb.src]) return pos[ea.src] < pos[eb.src];
        if (pos[ea.tgt] != pos[eb.tgt]) return pos[ea.tgt] < pos[eb.tgt];
        return ea.id < eb.id;
    });
    return cf;
}

CanonicalKey canonical_key(const TypedGraph& g) { return canonical_form(g).key; }

bool is_isomorphic(const TypedGraph& a, const TypedGraph& b) {
    if (a.n_vertices() != b.n_vertices() || a.n_edges() != b.n_edges()) return false;
    return canonical_key(a) == canonical_key(b);
}

std::string hex_key(const CanonicalKey& k) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(2 * k.size());
    for (unsigned char c : k) {
        out.push_back(digits[c >> 4]);
        out.push_back(digits[c & 0xF]);
    }
    return out;
}

CanonicalKey key_from_hex(const std::string& hex) {
    if (hex.size() % 2) throw std::invalid_argument("key_from_hex: odd length");
    auto nib = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        throw std::invalid_argument("key_from_hex: bad digit");
    };
    CanonicalKey out;
    out.reserve(hex.size() / 2);
    for (std::size_t i = 0; i < hex.size(); i += 2)
        out.push_back(static_cast<char>((nib(hex[i]) << 4) | nib(hex[i + 1])));
    return out;
}

}  // namespace rasm
