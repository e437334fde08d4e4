#ifndef RASM_TYPE_GRAPH_HPP
#define RASM_TYPE_GRAPH_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace rasm {

/**
 * The typing universe: a finite set of vertex type labels and edge type
 * labels, each edge type with fixed source/target vertex types.  Typed
 * graphs below carry type indices into one of these.
 */
struct TypeGraph {
    struct EdgeType {
        std::string label;
        int src = 0;  // vertex type index
        int tgt = 0;
        bool operator==(const EdgeType&) const = default;
    };

    std::vector<std::string> vertex_types;
    std::vector<EdgeType> edge_types;

    bool operator==(const TypeGraph&) const = default;

    int vertex_type_index(const std::string& label) const {
        for (std::size_t i = 0; i < vertex_types.size(); ++i)
            if (vertex_types[i] == label) return static_cast<int>(i);
        return -1;
    }

    int edge_type_index(const std::string& label) const {
        for (std::size_t i = 0; i < edge_types.size(); ++i)
            if (edge_types[i].label == label) return static_cast<int>(i);
        return -1;
    }

    // FNV-1a over the label structure; namespaces canonical keys so that
    // keys from different typing universes never compare equal by accident.
    std::uint64_t fingerprint() const {
        std::uint64_t h = 0xCBF29CE484222325ull;
        auto eat = [&h](const std::string& s) {
            for (unsigned char c : s) h = (h ^ c) * 0x100000001B3ull;
            h = (h ^ 0xFF) * 0x100000001B3ull;
        };
        for (const auto& v : vertex_types) eat(v);
        for (const auto& e : edge_types) {
            eat(e.label);
            h = (h ^ static_cast<std::uint64_t>(e.src)) * 0x100000001B3ull;
            h = (h ^ static_cast<std::uint64_t>(e.tgt)) * 0x100000001B3ull;
        }
        return h;
    }
};

}  // namespace rasm

#endif
