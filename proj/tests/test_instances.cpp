#include <doctest.h>

#include <array>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "rasm/canonical.hpp"
#include "rasm/instances.hpp"
#include "rasm/species.hpp"
#include "test_helpers.hpp"

using namespace rasm;
using rasm::testing::shape_graph;

namespace {

// counts (E, P1, P2, P3) on g
std::array<Int, 4> count_all(const PRBTSystem& sys, const TypedGraph& g) {
    std::array<Int, 4> c;
    for (int k = 0; k < 4; ++k) c[k] = observable_count(sys.observables[k], g);
    return c;
}

std::shared_ptr<const TypeGraph> plain_digraph_types() {
    auto tg = std::make_shared<TypeGraph>();
    tg->vertex_types = {"v"};
    tg->edge_types = {{"e", 0, 0}};
    return tg;
}

// three vertices a, b, c with the single edge a -> b
TypedGraph abc_host(const std::shared_ptr<const TypeGraph>& tg) {
    TypedGraph g(tg);
    g.add_vertex("a", "v");
    g.add_vertex("b", "v");
    g.add_vertex("c", "v");
    g.add_edge("ab", "e", "a", "b");
    return g;
}

}  // namespace

TEST_CASE("the shipped tree system has six unit splitting rules and identity observables") {
    PRBTSystem sys = make_remy_system();

    REQUIRE(sys.rules.size() == 6);
    std::set<std::string> names;
    for (const auto& wr : sys.rules) {
        CHECK(wr.weight == Rat(1));
        CHECK(wr.rule.condition.kind == Condition::Kind::True);
        names.insert(wr.rule.name);
    }
    CHECK(names == std::set<std::string>{"split_L_I", "split_L_L", "split_L_R", "split_R_I",
                                         "split_R_L", "split_R_R"});

    REQUIRE(sys.observables.size() == 4);
    const char* expected[] = {"E", "P1", "P2", "P3"};
    for (int k = 0; k < 4; ++k) {
        CHECK(sys.observables[k].name == expected[k]);
        for (const auto& part : sys.observables[k].parts) CHECK(is_identity_rule(part));
    }
    CHECK(sys.observables[0].parts.size() == 3);  // one per edge type
    int l_type = sys.type_graph->edge_type_index("L");
    for (int k = 1; k <= 3; ++k) {
        REQUIRE(sys.observables[k].parts.size() == 1);
        const TypedGraph& p = sys.observables[k].parts[0].i;
        CHECK(p.n_vertices() == k + 1);
        REQUIRE(p.n_edges() == k);
        for (int e = 0; e < p.n_edges(); ++e) CHECK(p.edge(e).type == l_type);
    }
}

TEST_CASE("the initial tree is the smallest state and carries no chain patterns") {
    PRBTSystem sys = make_remy_system();
    TypedGraph start = make_initial_tree(sys.type_graph);

    CHECK(start.n_vertices() == 2);
    REQUIRE(start.n_edges() == 1);
    CHECK(start.edge(0).type == sys.type_graph->edge_type_index("I"));

    auto c = count_all(sys, start);
    CHECK(c[0] == 1);
    CHECK(c[1] == 0);
    CHECK(c[2] == 0);
    CHECK(c[3] == 0);

    CHECK(is_state(sys.constraints, start));
    CHECK(is_prbf_state_structural(start));
}

TEST_CASE("the L splitting family alone produces the unique one-internal-vertex tree") {
    PRBTSystem sys = make_remy_system();
    TypedGraph start = make_initial_tree(sys.type_graph);

    std::vector<WeightedRule> l_family;
    for (const auto& wr : sys.rules)
        if (wr.rule.name.rfind("split_L_", 0) == 0) l_family.push_back(wr);
    REQUIRE(l_family.size() == 3);

    auto classes = derive_all(l_family, start, Semantics::SqPO);
    REQUIRE(classes.size() == 1);
    CHECK(classes.begin()->second.weight == Rat(1));
    CHECK(classes.begin()->first == canonical_key(shape_graph("(..)", sys.type_graph)));

    // only the I variant matches the initial tree's single edge
    for (const auto& wr : l_family) {
        std::size_t expected = wr.rule.name == "split_L_I" ? 1 : 0;
        CHECK(admissible_matches(wr.rule, start, Semantics::SqPO).size() == expected);
    }
}

TEST_CASE("moves from reachable states preserve states and shift counts in four ways") {
    PRBTSystem sys = make_remy_system();
    GenerationTable table =
        expand(sys.rules, make_initial_tree(sys.type_graph), 5, Semantics::SqPO);

    std::set<std::array<long, 4>> seen;
    for (int n = 0; n <= 5; ++n) {
        for (const auto& [key, entry] : table.generations[n]) {
            const TypedGraph& x = entry.representative;
            auto cx = count_all(sys, x);
            CHECK(cx[0] == 2 * n + 1);
            CHECK(cx[1] == n);

            Rat total = 0, p2_up = 0, p3_up = 0, p3_down = 0;
            for (const auto& [ykey, cls] : derive_all(sys.rules, x, Semantics::SqPO)) {
                CHECK(is_state(sys.constraints, cls.representative));
                CHECK(is_prbf_state_structural(cls.representative));

                auto cy = count_all(sys, cls.representative);
                std::array<long, 4> delta;
                for (int k = 0; k < 4; ++k) delta[k] = Int(cy[k] - cx[k]).get_si();
                seen.insert(delta);

                total += cls.weight;
                if (delta[2] == 1) p2_up += cls.weight;
                if (delta[3] == 1) p3_up += cls.weight;
                if (delta[3] == -1) p3_down += cls.weight;
            }
            // jump rate and the per-pattern creation/destruction balance
            CHECK(total == Rat(Int(2 * cx[0])));
            CHECK(p2_up == Rat(Int(3 * cx[1] - 2 * cx[2])));
            CHECK(p3_up == Rat(Int(4 * cx[2] - 3 * cx[3])));
            CHECK(p3_down == Rat(cx[3]));
        }
    }
    // every move adds one edge pair and one L-edge; a 2-chain is created or
    // not; a 3-chain may also be destroyed, once per existing instance
    std::set<std::array<long, 4>> expected = {
        {2, 1, 0, -1}, {2, 1, 0, 0}, {2, 1, 1, 0}, {2, 1, 1, 1}};
    CHECK(seen == expected);
}

TEST_CASE("shipped chain patterns regenerate as the first discovery solution") {
    PRBTSystem sys = make_remy_system();
    GenerationTable table =
        expand(sys.rules, make_initial_tree(sys.type_graph), 6, Semantics::SqPO);
    std::vector<TypedGraph> cands = pattern_candidates(sys.constraints, 3, 6);

    auto found = discover_patterns(table, 5, sys.rules, cands, {},
                                   prbt_discovery_relations(), 3);
    REQUIRE(!found.empty());
    CHECK(found.size() == 432);

    REQUIRE(found[0].size() == 3);
    for (int k = 0; k < 3; ++k) {
        const TypedGraph& shipped = sys.observables[k + 1].parts[0].i;
        CHECK(canonical_key(cands[found[0][k]]) == canonical_key(shipped));
    }
}

TEST_CASE("comb trees pin the chain pattern counts") {
    PRBTSystem sys = make_remy_system();

    TypedGraph left = shape_graph("(((..).).)", sys.type_graph);
    auto cl = count_all(sys, left);
    CHECK(cl[0] == 7);
    CHECK(cl[1] == 3);
    CHECK(cl[2] == 2);
    CHECK(cl[3] == 1);

    TypedGraph right = shape_graph("(.(.(..)))", sys.type_graph);
    auto cr = count_all(sys, right);
    CHECK(cr[0] == 7);
    CHECK(cr[1] == 3);
    CHECK(cr[2] == 0);
    CHECK(cr[3] == 0);
}

TEST_CASE("constraint set and structural oracle agree where both can see") {
    PRBTSystem sys = make_remy_system();
    const auto& tg = sys.type_graph;
    const auto& cs = sys.constraints;

    auto both = [&](const TypedGraph& g, bool cset, bool structural) {
        CHECK(is_state(cs, g) == cset);
        CHECK(is_prbf_state_structural(g) == structural);
    };

    // parallel edges
    TypedGraph par(tg);
    par.add_vertex("u", "node");
    par.add_vertex("v", "node");
    par.add_edge("e0", "L", "u", "v");
    par.add_edge("e1", "L", "u", "v");
    both(par, false, false);

    // in-degree two from distinct sources
    TypedGraph indeg(tg);
    indeg.add_vertex("u", "node");
    indeg.add_vertex("v", "node");
    indeg.add_vertex("w", "node");
    indeg.add_edge("e0", "L", "u", "w");
    indeg.add_edge("e1", "R", "v", "w");
    both(indeg, false, false);

    // an L child without the matching R child
    TypedGraph half(tg);
    half.add_vertex("a", "node");
    half.add_vertex("w", "node");
    half.add_vertex("x", "node");
    half.add_edge("i", "I", "a", "w");
    half.add_edge("l", "L", "w", "x");
    both(half, false, false);

    // anchor that is itself somebody's child
    TypedGraph hung(tg);
    hung.add_vertex("u", "node");
    hung.add_vertex("v", "node");
    hung.add_vertex("w", "node");
    hung.add_edge("e0", "L", "u", "v");
    hung.add_edge("e1", "I", "v", "w");
    both(hung, false, false);

    // mixed out-edges I and L from one vertex
    TypedGraph mixed(tg);
    mixed.add_vertex("u", "node");
    mixed.add_vertex("v", "node");
    mixed.add_vertex("w", "node");
    mixed.add_edge("e0", "I", "u", "v");
    mixed.add_edge("e1", "L", "u", "w");
    both(mixed, false, false);

    // unreachable lone vertex
    TypedGraph lone(tg);
    lone.add_vertex("x", "node");
    both(lone, false, false);

    // two disjoint planted trees form a state
    TypedGraph forest(tg);
    forest.add_vertex("r1", "node");
    forest.add_vertex("a", "node");
    forest.add_edge("i1", "I", "r1", "a");
    forest.add_vertex("r2", "node");
    forest.add_vertex("b", "node");
    forest.add_edge("i2", "I", "r2", "b");
    both(forest, true, true);

    // the gaps the first-order constraints cannot express: an anchorless
    // 2-cycle with leaf children satisfies every local check, and the empty
    // graph satisfies everything vacuously; the oracle rejects both
    TypedGraph cyc(tg);
    cyc.add_vertex("u", "node");
    cyc.add_vertex("v", "node");
    cyc.add_vertex("a", "node");
    cyc.add_vertex("b", "node");
    cyc.add_edge("e0", "L", "u", "v");
    cyc.add_edge("e1", "L", "v", "u");
    cyc.add_edge("e2", "R", "u", "a");
    cyc.add_edge("e3", "R", "v", "b");
    both(cyc, true, false);

    both(TypedGraph(tg), true, false);
}

TEST_CASE("a delete-and-recreate rule counts isolated vertices exactly when run as DPO") {
    auto tg = plain_digraph_types();
    TypedGraph host = abc_host(tg);

    TypedGraph dot(tg);
    dot.add_vertex("x", "v");
    TypedGraph none(tg);
    Rule isolated("isolated", dot, none, dot, Morphism{}, Morphism{});

    // DPO refuses to delete a vertex with incident edges, so only c matches
    CHECK(count_matches(isolated, host, Semantics::DPO) == Int(1));
    CHECK(count_matches(isolated, host, Semantics::SqPO) == Int(3));
    CHECK(count_matches(Rule::identity("vertex", dot), host, Semantics::DPO) == Int(3));
}

TEST_CASE("unlinked ordered pairs via a negative application condition") {
    auto tg = plain_digraph_types();
    TypedGraph host = abc_host(tg);

    TypedGraph pair(tg);
    pair.add_vertex("u", "v");
    pair.add_vertex("v", "v");
    TypedGraph uv = pair;
    uv.add_edge("f", "e", "u", "v");
    TypedGraph vu = pair;
    vu.add_edge("f", "e", "v", "u");
    Morphism emb = Morphism::identity(pair);

    // "not linked" is direction-blind: a pair is excluded whichever way the
    // edge points, so an ordered pair is counted iff neither direction exists
    Condition no_edge = Condition::conjunction({
        Condition::negation(Condition::exists(uv, emb)),
        Condition::negation(Condition::exists(vu, emb)),
    });
    Rule unlinked = Rule::identity("unlinked_pair", pair, no_edge);
    CHECK(count_matches(unlinked, host, Semantics::SqPO) == Int(4));

    // one-sided variant: (b, a) slips through because the host edge runs a->b
    Rule one_sided = Rule::identity(
        "no_forward_edge", pair, Condition::negation(Condition::exists(uv, emb)));
    CHECK(count_matches(one_sided, host, Semantics::SqPO) == Int(5));
}

TEST_CASE("closed-form reference values") {
    ReferenceValues r0 = reference_values(0);
    CHECK(r0.g_n == 1);
    CHECK(r0.catalan_n == 1);
    CHECK(r0.edges_n == 1);

    ReferenceValues r5 = reference_values(5);
    CHECK(r5.g_n == 30240);
    CHECK(r5.catalan_n == 42);
    CHECK(r5.edges_n == 11);

    ReferenceValues r8 = reference_values(8);
    CHECK(r8.g_n == 518918400);
    CHECK(r8.catalan_n == 1430);
    CHECK(r8.edges_n == 17);

    CHECK_THROWS_AS(reference_values(-1), std::invalid_argument);
}
