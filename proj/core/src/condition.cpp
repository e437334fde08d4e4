#include "rasm/condition.hpp"

#include <stdexcept>

namespace rasm {

Condition Condition::exists(TypedGraph y, Morphism embed) {
    return exists(std::move(y), std::move(embed), Condition::truth());
}

Condition Condition::exists(TypedGraph y, Morphism embed, Condition sub) {
    Condition c;
    c.kind = Kind::Exists;
    c.y = std::move(y);
    c.embed = std::move(embed);
    c.subs.push_back(std::move(sub));
    return c;
}

Condition Condition::negation(Condition sub) {
    Condition c;
    c.kind = Kind::Not;
    c.subs.push_back(std::move(sub));
    return c;
}

Condition Condition::conjunction(std::vector<Condition> subs) {
    Condition c;
    c.kind = Kind::And;
    c.subs = std::move(subs);
    return c;
}

Condition Condition::forall(TypedGraph y, Morphism embed, Condition sub) {
    return negation(exists(std::move(y), std::move(embed), negation(std::move(sub))));
}

Condition Condition::disjunction(std::vector<Condition> subs) {
    std::vector<Condition> negs;
    negs.reserve(subs.size());
    for (auto& s : subs) negs.push_back(negation(std::move(s)));
    return negation(conjunction(std::move(negs)));
}

bool satisfies(const TypedGraph& x, const TypedGraph& z, const Morphism& a, const Condition& c) {
    switch (c.kind) {
        case Condition::Kind::True:
            return true;
        case Condition::Kind::Not:
            return !satisfies(x, z, a, c.subs[0]);
        case Condition::Kind::And: {
            for (const auto& s : c.subs)
                if (!satisfies(x, z, a, s)) return false;
            return true;
        }
        case Condition::Kind::Exists: {
            if (static_cast<int>(c.embed.v.size()) != x.n_vertices() ||
                static_cast<int>(c.embed.e.size()) != x.n_edges())
                throw std::invalid_argument("satisfies: embed domain does not match context");
            MonoSpec spec;
            spec.fix_v.assign(c.y.n_vertices(), -1);
            spec.fix_e.assign(c.y.n_edges(), -1);
            for (int i = 0; i < x.n_vertices(); ++i) spec.fix_v[c.embed.v[i]] = a.v[i];
            for (int i = 0; i < x.n_edges(); ++i) spec.fix_e[c.embed.e[i]] = a.e[i];
            bool found = false;
            for_each_mono(c.y, z, &spec, [&](const Morphism& b) {
                if (satisfies(c.y, z, b, c.subs[0])) {
                    found = true;
                    return false;  // stop
                }
                return true;
            });
            return found;
        }
    }
    return true;
}

bool satisfies_empty(const TypedGraph& empty_context, const TypedGraph& z, const Condition& c) {
    if (empty_context.n_vertices() != 0 || empty_context.n_edges() != 0)
        throw std::invalid_argument("satisfies_empty: context not empty");
    Morphism a;  // empty maps
    return satisfies(empty_context, z, a, c);
}

namespace {

void raw_graph_bytes(const TypedGraph& g, std::string& out) {
    out += "g(";
    out += std::to_string(g.n_vertices());
    out += ";";
    for (int v = 0; v < g.n_vertices(); ++v) {
        out += std::to_string(g.vertex(v).type);
        out += ",";
    }
    out += ";";
    for (int e = 0; e < g.n_edges(); ++e) {
        out += std::to_string(g.edge(e).type) + ":" + std::to_string(g.edge(e).src) + ">" +
               std::to_string(g.edge(e).tgt) + ",";
    }
    out += ")";
}

void fingerprint_rec(const Condition& c, std::string& out) {
    switch (c.kind) {
        case Condition::Kind::True:
            out += "T";
            return;
        case Condition::Kind::Not:
            out += "N[";
            fingerprint_rec(c.subs[0], out);
            out += "]";
            return;
        case Condition::Kind::And:
            out += "A[";
            for (const auto& s : c.subs) {
                fingerprint_rec(s, out);
                out += ";";
            }
            out += "]";
            return;
        case Condition::Kind::Exists:
            out += "E[";
            raw_graph_bytes(c.y, out);
            out += "|v";
            for (int i : c.embed.v) out += std::to_string(i) + ",";
            out += "|e";
            for (int i : c.embed.e) out += std::to_string(i) + ",";
            out += "|";
            fingerprint_rec(c.subs[0], out);
            out += "]";
            return;
    }
}

}  // namespace

std::string condition_fingerprint(const Condition& c) {
    std::string out;
    fingerprint_rec(c, out);
    return out;
}

bool is_pattern(const ConstraintSet& cs, const TypedGraph& g) {
    for (const auto& f : cs.forbidden) {
        bool embeds = false;
        for_each_mono(f, g, nullptr, [&](const Morphism&) {
            embeds = true;
            return false;
        });
        if (embeds) return false;
    }
    return true;
}

bool is_state(const ConstraintSet& cs, const TypedGraph& g) {
    return is_pattern(cs, g) && satisfies_empty(cs.empty, g, cs.positive);
}

}  // namespace rasm
