#include <doctest.h>

#include <cmath>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "rasm/instances.hpp"
#include "rasm/markov.hpp"
#include "rasm/species.hpp"
#include "test_helpers.hpp"

using namespace rasm;
using rasm::testing::shape_graph;
using rasm::testing::tree_shapes;

namespace {

std::shared_ptr<const StateBasis> basis_of(const GenerationTable& table) {
    return std::make_shared<StateBasis>(state_basis(table));
}

// single vertex of the given type, for the four-state absorption walk below
TypedGraph lone(const std::shared_ptr<const TypeGraph>& tg, const std::string& type) {
    TypedGraph g(tg);
    g.add_vertex("x", type);
    return g;
}

Rule retype(const std::string& name, const std::shared_ptr<const TypeGraph>& tg,
            const std::string& from, const std::string& to) {
    TypedGraph none(tg);
    return Rule(name, lone(tg, to), none, lone(tg, from), Morphism{}, Morphism{});
}

}  // namespace

TEST_CASE("the splitting chain rate matrix is conservative with hand-checked columns") {
    auto sys = make_remy_system();
    TransitionSet ts{sys.rules, Semantics::SqPO};
    TypedGraph x0 = make_initial_tree(sys.type_graph);
    auto basis = basis_of(expand(sys.rules, x0, 3, ts.semantics));
    SparseOperator h = build_generator(ts, basis);

    int j0 = basis->find(canonical_key(x0));
    int j1 = basis->find(canonical_key(shape_graph("(..)", sys.type_graph)));
    REQUIRE(j0 >= 0);
    REQUIRE(j1 >= 0);

    // the one-leaf tree has two admissible splits, both onto the same class
    CHECK(h.cols[j0].size() == 2);
    CHECK(h.entry(j1, j0) == Rat(2));
    CHECK(h.entry(j0, j0) == Rat(-2));
    CHECK(h.entry(j1, j1) == Rat(-6));

    for (int j = 0; j < basis->size(); ++j) {
        CHECK(h.column_sum(j) == Rat(0));
        CHECK(h.col_complete[j] == (basis->generation[j] < 3 ? 1 : 0));
        for (const auto& [row, v] : h.cols[j]) {
            if (row == j)
                CHECK(v < 0);
            else
                CHECK(v > 0);
        }
    }

    WeightedRule dead{Rat(0), sys.rules[0].rule};
    CHECK_THROWS_AS(build_generator(TransitionSet{{dead}, Semantics::SqPO}, basis),
                    std::invalid_argument);
}

TEST_CASE("the vertex birth-death rate matrix is the classic tridiagonal operator") {
    auto bd = make_birth_death(false);
    TransitionSet ts{bd.rules, Semantics::SqPO};
    TypedGraph empty = make_vertices(bd.type_graph, 0);
    auto basis = basis_of(expand(bd.rules, empty, 5, ts.semantics));
    REQUIRE(basis->size() == 6);
    SparseOperator h = build_generator(ts, basis);

    std::vector<int> at(6);
    for (int n = 0; n < 6; ++n) {
        at[n] = basis->find(canonical_key(make_vertices(bd.type_graph, n)));
        REQUIRE(at[n] >= 0);
    }

    for (int n = 0; n < 5; ++n) {
        CHECK(h.entry(at[n + 1], at[n]) == Rat(1));         // birth propensity
        if (n > 0) CHECK(h.entry(at[n - 1], at[n]) == Rat(n));  // death propensity
        CHECK(h.entry(at[n], at[n]) == Rat(-(n + 1)));
        CHECK(h.column_sum(at[n]) == Rat(0));
        CHECK(h.col_complete[at[n]] == 1);
    }
    CHECK(h.col_complete[at[5]] == 0);  // births from 5 leave the basis
}

TEST_CASE("the jump chain normalizes exit rates and keeps truncation visible") {
    auto sys = make_remy_system();
    TransitionSet ts{sys.rules, Semantics::SqPO};
    TypedGraph x0 = make_initial_tree(sys.type_graph);
    auto basis = basis_of(expand(sys.rules, x0, 3, ts.semantics));
    SparseOperator d = embedded_dtmc(ts, basis);

    int j0 = basis->find(canonical_key(x0));
    int j1 = basis->find(canonical_key(shape_graph("(..)", sys.type_graph)));
    CHECK(d.cols[j0].size() == 1);
    CHECK(d.entry(j1, j0) == Rat(1));

    // both two-leaf shapes are reached from the one-leaf tree with weight 3 of 6
    CHECK(d.cols[j1].size() == 2);
    for (const auto& [row, v] : d.cols[j1]) {
        CHECK(row != j1);
        CHECK(v == make_rat(1, 2));
    }

    for (int j = 0; j < basis->size(); ++j)
        if (d.col_complete[j]) CHECK(d.column_sum(j) == Rat(1));
}

TEST_CASE("states without moves become self-loops or drain under the literal convention") {
    auto bd = make_birth_death(true);  // birth gated on three vertices present
    TransitionSet ts{bd.rules, Semantics::SqPO};
    TypedGraph two = make_vertices(bd.type_graph, 2);
    auto basis = basis_of(expand(bd.rules, two, 3, ts.semantics));
    REQUIRE(basis->size() == 3);
    int j_empty = basis->find(canonical_key(make_vertices(bd.type_graph, 0)));
    REQUIRE(j_empty >= 0);

    SparseOperator loop = embedded_dtmc(ts, basis);
    CHECK(loop.col_complete[j_empty] == 1);
    CHECK(loop.entry(j_empty, j_empty) == Rat(1));

    StateDistribution held = dtmc_propagate(loop, two, 5);
    REQUIRE(held.size() == 1);
    CHECK(held.begin()->second == Rat(1));

    SparseOperator drain = embedded_dtmc(ts, basis, false);
    CHECK(drain.cols[j_empty].empty());
    CHECK(dtmc_propagate(drain, two, 2).size() == 1);
    CHECK(dtmc_propagate(drain, two, 3).empty());  // mass leaves the void state
}

TEST_CASE("exact jump-chain propagation reproduces the uniform shape law") {
    auto sys = make_remy_system();
    TransitionSet ts{sys.rules, Semantics::SqPO};
    TypedGraph x0 = make_initial_tree(sys.type_graph);
    auto basis = basis_of(expand(sys.rules, x0, 4, ts.semantics));
    SparseOperator d = embedded_dtmc(ts, basis);

    StateDistribution start = dtmc_propagate(d, x0, 0);
    REQUIRE(start.size() == 1);
    CHECK(start.at(canonical_key(x0)) == Rat(1));

    for (int n : {3, 4}) {
        StateDistribution dist = dtmc_propagate(d, x0, n);
        auto shapes = tree_shapes(n);
        REQUIRE(dist.size() == shapes.size());
        Rat total = 0;
        for (const auto& s : shapes) {
            auto it = dist.find(canonical_key(shape_graph(s, sys.type_graph)));
            REQUIRE(it != dist.end());
            CHECK(it->second == Rat(1) / Rat(static_cast<long>(shapes.size())));
            total += it->second;
        }
        CHECK(total == Rat(1));
    }

    // one step further would need the columns the truncation cut off
    CHECK_THROWS_AS(dtmc_propagate(d, x0, 5), std::runtime_error);
    CHECK_THROWS_AS(dtmc_propagate(d, shape_graph("(((((..).).).).)", sys.type_graph), 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(dtmc_propagate(d, x0, -1), std::invalid_argument);
}

TEST_CASE("absorption probabilities solve a two-exit walk exactly") {
    auto tg = std::make_shared<const TypeGraph>(
        TypeGraph{{"a", "b", "c", "d"}, {}});
    std::vector<WeightedRule> rules = {
        {Rat(1), retype("ab", tg, "a", "b")},
        {Rat(1), retype("ac", tg, "a", "c")},
        {Rat(1), retype("ba", tg, "b", "a")},
        {Rat(1), retype("bd", tg, "b", "d")},
    };
    TransitionSet ts{rules, Semantics::SqPO};
    TypedGraph a = lone(tg, "a");
    auto basis = basis_of(expand(rules, a, 3, ts.semantics));
    REQUIRE(basis->size() == 4);
    SparseOperator d = embedded_dtmc(ts, basis);

    auto key = [&](const std::string& t) { return canonical_key(lone(tg, t)); };
    auto into_c = absorption_probabilities(d, key("c"));
    CHECK(into_c.at(key("a")) == make_rat(2, 3));
    CHECK(into_c.at(key("b")) == make_rat(1, 3));
    CHECK(into_c.at(key("c")) == Rat(1));
    CHECK(into_c.at(key("d")) == Rat(0));

    auto into_d = absorption_probabilities(d, key("d"));
    CHECK(into_d.at(key("a")) == make_rat(1, 3));
    CHECK(into_d.at(key("b")) == make_rat(2, 3));
    for (const auto& [k, p] : into_c) CHECK(p + into_d.at(k) == Rat(1));

    TypedGraph outside(tg);
    outside.add_vertex("x", "a");
    outside.add_vertex("y", "a");
    CHECK_THROWS_AS(absorption_probabilities(d, canonical_key(outside)),
                    std::invalid_argument);

    auto sys = make_remy_system();
    TypedGraph x0 = make_initial_tree(sys.type_graph);
    auto tree_basis = basis_of(expand(sys.rules, x0, 2, Semantics::SqPO));
    SparseOperator truncated = embedded_dtmc(TransitionSet{sys.rules, Semantics::SqPO},
                                             tree_basis);
    CHECK_THROWS_AS(absorption_probabilities(truncated, canonical_key(x0)),
                    std::runtime_error);
}

TEST_CASE("the conditioned birth-death chain is absorbed at the empty graph") {
    auto bd = make_birth_death(true);
    TransitionSet ts{bd.rules, Semantics::SqPO};
    TypedGraph two = make_vertices(bd.type_graph, 2);
    auto basis = basis_of(expand(bd.rules, two, 2, ts.semantics));
    SparseOperator d = embedded_dtmc(ts, basis);

    auto p = absorption_probabilities(d, canonical_key(make_vertices(bd.type_graph, 0)));
    REQUIRE(p.size() == 3);
    for (const auto& [k, v] : p) CHECK(v == Rat(1));
}

TEST_CASE("stochastic trajectories are reproducible and advance strictly in time") {
    auto sys = make_remy_system();
    TransitionSet ts{sys.rules, Semantics::SqPO};
    TypedGraph x0 = make_initial_tree(sys.type_graph);

    SsaOptions opt;
    opt.max_steps = 20;
    std::vector<Observable> tracked = {sys.observables[0]};  // edge count

    Trajectory t1 = ssa_run(ts, x0, opt, 12345, tracked);
    Trajectory t2 = ssa_run(ts, x0, opt, 12345, tracked);
    REQUIRE(t1.points.size() == 21);  // splitting never stalls
    CHECK(t1.seed == 12345);
    CHECK(!t1.absorbed);
    REQUIRE(t2.points.size() == t1.points.size());
    for (std::size_t i = 0; i < t1.points.size(); ++i) {
        CHECK(t1.points[i].t == t2.points[i].t);
        CHECK(t1.points[i].state == t2.points[i].state);
        CHECK(t1.points[i].counts == t2.points[i].counts);
    }

    CHECK(t1.points[0].t == 0.0);
    CHECK(t1.points[0].state == canonical_key(x0));
    for (std::size_t i = 0; i < t1.points.size(); ++i) {
        if (i > 0) CHECK(t1.points[i].t > t1.points[i - 1].t);
        // each split adds two edges
        CHECK(t1.points[i].counts[0] == Int(2 * static_cast<long>(i) + 1));
    }

    Trajectory other = ssa_run(ts, x0, opt, 54321, tracked);
    CHECK(other.points[1].t != t1.points[1].t);

    SsaOptions stop_now;
    stop_now.max_time = 0.0;
    Trajectory cut = ssa_run(ts, x0, stop_now, 7);
    CHECK(cut.points.size() == 1);
    CHECK(!cut.absorbed);

    SsaOptions unbounded;
    CHECK_THROWS_AS(ssa_run(ts, x0, unbounded, 7), std::invalid_argument);
}

TEST_CASE("a dead chain is reported as absorbed rather than padded") {
    auto bd = make_birth_death(false);
    TransitionSet death_only{{bd.rules[1]}, Semantics::SqPO};
    SsaOptions opt;
    opt.max_time = 10.0;

    Trajectory tr = ssa_run(death_only, make_vertices(bd.type_graph, 0), opt, 99);
    CHECK(tr.absorbed);
    CHECK(tr.points.size() == 1);

    Trajectory down = ssa_run(death_only, make_vertices(bd.type_graph, 3), opt, 99);
    CHECK(down.absorbed);
    CHECK(down.points.size() == 4);  // 3 -> 2 -> 1 -> 0, then silence
}

TEST_CASE("the first waiting time of the splitting chain has the exact mean rate") {
    auto sys = make_remy_system();
    TransitionSet ts{sys.rules, Semantics::SqPO};
    TypedGraph x0 = make_initial_tree(sys.type_graph);
    CanonicalKey one_split = canonical_key(shape_graph("(..)", sys.type_graph));

    SsaOptions opt;
    opt.max_steps = 1;
    const int runs = 10000;
    double sum = 0;
    for (int seed = 0; seed < runs; ++seed) {
        Trajectory tr = ssa_run(ts, x0, opt, static_cast<std::uint64_t>(seed));
        REQUIRE(tr.points.size() == 2);
        CHECK(tr.points[1].state == one_split);  // the only reachable class
        sum += tr.points[1].t;
    }
    // exponential with rate 2: mean 1/2, sd 1/2, so 3 standard errors is 0.015
    CHECK(std::abs(sum / runs - 0.5) < 0.015);
}

TEST_CASE("trajectory export writes one JSON object per line") {
    auto sys = make_remy_system();
    TransitionSet ts{sys.rules, Semantics::SqPO};
    TypedGraph x0 = make_initial_tree(sys.type_graph);
    SsaOptions opt;
    opt.max_steps = 2;

    Trajectory tr = ssa_run(ts, x0, opt, 31, {sys.observables[0], sys.observables[1]});
    std::ostringstream os;
    export_trajectory_jsonl(tr, {"n_E", "n_P1"}, os);

    std::istringstream is(os.str());
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(is, line)) lines.push_back(line);
    REQUIRE(lines.size() == 3);
    CHECK(lines[0].find("\"t\":0.0") != std::string::npos);
    CHECK(lines[0].find("\"state\":\"" + hex_key(canonical_key(x0)) + "\"") !=
          std::string::npos);
    CHECK(lines[0].find("\"n_E\":1") != std::string::npos);
    CHECK(lines[0].find("\"n_P1\":0") != std::string::npos);
    CHECK(lines[2].find("\"n_E\":5") != std::string::npos);
    CHECK(lines[2].find("\"n_P1\":2") != std::string::npos);
}

TEST_CASE("the count-shift table of the splitting chain closes over four shifts") {
    auto sys = make_remy_system();
    TransitionSet ts{sys.rules, Semantics::SqPO};
    TypedGraph x0 = make_initial_tree(sys.type_graph);
    GenerationTable table = expand(sys.rules, x0, 5, ts.semantics);
    CountTable counts = count_patterns(table, sys.observables);

    MarginalGenerator mg = derive_marginal_generator(table, counts, ts);
    REQUIRE(mg.transitions.size() == 4);

    // deltas in lexicographic order over (edges, one-, two-, three-chains)
    CHECK(mg.transitions[0].delta == CountVector{2, 1, 0, -1});
    CHECK(mg.transitions[1].delta == CountVector{2, 1, 0, 0});
    CHECK(mg.transitions[2].delta == CountVector{2, 1, 1, 0});
    CHECK(mg.transitions[3].delta == CountVector{2, 1, 1, 1});

    // total activity is twice the edge count; the one-chain column is an
    // affine combination of the others on reachable states (every tree has
    // n_E = 2 n_P1 + 1), so the fit leaves its coefficient at zero
    CHECK(mg.normalizer.constant == Rat(0));
    CHECK(mg.normalizer.coeffs == std::vector<Rat>{Rat(2), Rat(0), Rat(0), Rat(0)});

    CHECK(mg.transitions[0].weight.constant == Rat(0));
    CHECK(mg.transitions[0].weight.coeffs ==
          std::vector<Rat>{Rat(0), Rat(0), Rat(0), Rat(1)});

    CHECK(mg.transitions[1].weight.constant == make_rat(3, 2));
    CHECK(mg.transitions[1].weight.coeffs ==
          std::vector<Rat>{make_rat(1, 2), Rat(0), Rat(2), Rat(-1)});

    CHECK(mg.transitions[2].weight.constant == make_rat(-3, 2));
    CHECK(mg.transitions[2].weight.coeffs ==
          std::vector<Rat>{make_rat(3, 2), Rat(0), Rat(-6), Rat(3)});

    CHECK(mg.transitions[3].weight.constant == Rat(0));
    CHECK(mg.transitions[3].weight.coeffs ==
          std::vector<Rat>{Rat(0), Rat(0), Rat(4), Rat(-3)});

    Rat c_sum = 0;
    std::vector<Rat> coeff_sum(4, Rat(0));
    for (const auto& tr : mg.transitions) {
        c_sum += tr.weight.constant;
        for (int i = 0; i < 4; ++i) coeff_sum[i] += tr.weight.coeffs[i];
    }
    CHECK(c_sum == mg.normalizer.constant);
    CHECK(coeff_sum == mg.normalizer.coeffs);

    // spot check on the three-internal-vertex combs
    CountVector left{7, 3, 2, 1}, right{7, 3, 0, 0};
    CHECK(mg.normalizer.eval(left) == Rat(14));
    CHECK(mg.transitions[0].weight.eval(left) == Rat(1));
    CHECK(mg.transitions[3].weight.eval(left) == Rat(5));
    CHECK(mg.transitions[2].weight.eval(left) == Rat(0));
    CHECK(mg.transitions[2].weight.eval(right) == Rat(9));
    CHECK(mg.transitions[3].weight.eval(right) == Rat(0));

    GenerationTable shallow = expand(sys.rules, x0, 3, ts.semantics);
    CHECK_THROWS_AS(
        derive_marginal_generator(shallow, count_patterns(shallow, sys.observables), ts),
        std::invalid_argument);
}

TEST_CASE("a wrong pattern choice is rejected with a witness state") {
    auto sys = make_remy_system();
    TransitionSet ts{sys.rules, Semantics::SqPO};
    GenerationTable table = expand(sys.rules, make_initial_tree(sys.type_graph), 4,
                                   ts.semantics);
    CountTable bad = count_patterns(table, sys.observables);
    for (auto& [key, row] : bad) row[2] = row[1];  // report one-chains twice

    CHECK_THROWS_WITH_AS(derive_marginal_generator(table, bad, ts),
                         doctest::Contains("witness"), std::runtime_error);
}

TEST_CASE("marginal propagation matches exact state propagation") {
    auto sys = make_remy_system();
    TransitionSet ts{sys.rules, Semantics::SqPO};
    TypedGraph x0 = make_initial_tree(sys.type_graph);

    GenerationTable fit_table = expand(sys.rules, x0, 5, ts.semantics);
    MarginalGenerator mg =
        derive_marginal_generator(fit_table, count_patterns(fit_table, sys.observables), ts);

    GenerationTable deep = expand(sys.rules, x0, 6, ts.semantics);
    CountTable deep_counts = count_patterns(deep, sys.observables);
    auto basis = basis_of(deep);
    SparseOperator d = embedded_dtmc(ts, basis);

    CountVector c0{1, 0, 0, 0};
    for (int n = 0; n <= 6; ++n) {
        CountDistribution marginal = marginal_propagate(mg, c0, n);
        CountDistribution folded;
        for (const auto& [key, p] : dtmc_propagate(d, x0, n)) {
            const auto& row = deep_counts.at(key);
            CountVector c(row.size());
            for (std::size_t i = 0; i < row.size(); ++i) c[i] = row[i].get_si();
            folded[c] += p;
        }
        CHECK(marginal == folded);

        Rat mass = 0;
        for (const auto& [c, p] : marginal) mass += p;
        CHECK(mass == Rat(1));

        CountDistribution chains = project_counts(marginal, {2, 3});
        CountDistribution chains_folded = project_counts(folded, {2, 3});
        CHECK(chains == chains_folded);

        CountDistribution edge = project_counts(marginal, {0});
        REQUIRE(edge.size() == 1);
        CHECK(edge.begin()->first == CountVector{2 * n + 1});
        CHECK(edge.begin()->second == Rat(1));
    }
}

TEST_CASE("count chains with vanishing activity hold their mass") {
    auto bd = make_birth_death(false);
    std::vector<WeightedRule> death_only = {bd.rules[1]};
    TransitionSet ts{death_only, Semantics::SqPO};

    TypedGraph one(bd.type_graph);
    one.add_vertex("p", 0);
    Observable n_v{"n_V", {Rule::identity("n_V", one)}};

    GenerationTable table = expand(death_only, make_vertices(bd.type_graph, 3), 4,
                                   ts.semantics);
    MarginalGenerator mg = derive_marginal_generator(table, count_patterns(table, {n_v}), ts);
    REQUIRE(mg.transitions.size() == 1);
    CHECK(mg.transitions[0].delta == CountVector{-1});
    CHECK(mg.transitions[0].weight.constant == Rat(0));
    CHECK(mg.transitions[0].weight.coeffs == std::vector<Rat>{Rat(1)});
    CHECK(mg.normalizer.coeffs == std::vector<Rat>{Rat(1)});

    CountDistribution end = marginal_propagate(mg, {3}, 6);
    REQUIRE(end.size() == 1);
    CHECK(end.at(CountVector{0}) == Rat(1));  // held at zero for three steps

    CHECK(marginal_propagate(mg, {3}, 0).at(CountVector{3}) == Rat(1));
}

TEST_CASE("a single tracked count gives the pure growth chain") {
    auto sys = make_remy_system();
    TransitionSet ts{sys.rules, Semantics::SqPO};
    GenerationTable table = expand(sys.rules, make_initial_tree(sys.type_graph), 4,
                                   ts.semantics);
    MarginalGenerator mg =
        derive_marginal_generator(table, count_patterns(table, {sys.observables[0]}), ts);

    REQUIRE(mg.transitions.size() == 1);
    CHECK(mg.transitions[0].delta == CountVector{2});
    CHECK(mg.transitions[0].weight.coeffs == std::vector<Rat>{Rat(2)});

    CountDistribution dist = marginal_propagate(mg, {1}, 4);
    REQUIRE(dist.size() == 1);
    CHECK(dist.at(CountVector{9}) == Rat(1));
}

TEST_CASE("broken marginal tables are rejected at propagation time") {
    MarginalGenerator bad;
    bad.normalizer = AffineForm{Rat(0), {Rat(1)}};
    bad.transitions.push_back({CountVector{-1}, AffineForm{Rat(-1), {Rat(0)}}});
    CHECK_THROWS_AS(marginal_propagate(bad, {2}, 1), std::runtime_error);

    MarginalGenerator leaky;
    leaky.normalizer = AffineForm{Rat(0), {Rat(2)}};
    leaky.transitions.push_back({CountVector{-1}, AffineForm{Rat(0), {Rat(1)}}});
    CHECK_THROWS_AS(marginal_propagate(leaky, {2}, 1), std::runtime_error);

    CHECK_THROWS_AS(marginal_propagate(leaky, {2}, -1), std::invalid_argument);
}

TEST_CASE("distribution export is byte-deterministic") {
    CountDistribution dist;
    dist[{1, 2}] = make_rat(3, 4);
    dist[{1, 0}] = make_rat(1, 4);

    std::ostringstream csv;
    export_distribution(dist, {"a", "b"}, "csv", csv);
    CHECK(csv.str() == "a,b,probability\n1,0,0.25\n1,2,0.75\n");

    CountDistribution thirds;
    thirds[{0}] = make_rat(1, 3);
    thirds[{1}] = make_rat(2, 3);
    std::ostringstream csv3;
    export_distribution(thirds, {"k"}, "csv", csv3);
    CHECK(csv3.str() ==
          "k,probability\n0,0.333333333333333\n1,0.666666666666667\n");

    std::ostringstream js;
    export_distribution(dist, {"a", "b"}, "json", js);
    CHECK(js.str().find("\"probability\": \"1/4\"") != std::string::npos);
    CHECK(js.str().find("\"probability\": \"3/4\"") != std::string::npos);
    CHECK(js.str().find("\"a\": 1") != std::string::npos);

    std::ostringstream sink;
    CHECK_THROWS_AS(export_distribution(dist, {"a", "b"}, "yaml", sink),
                    std::invalid_argument);
    CHECK_THROWS_AS(project_counts(dist, {5}), std::invalid_argument);
}
