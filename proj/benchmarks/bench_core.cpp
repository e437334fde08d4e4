// Microbenchmarks for the operations that dominate real workloads:
// canonical labelling, match enumeration, one-state derivation, state
// space expansion, operator assembly, and exact jump-chain propagation.

#include <benchmark/benchmark.h>

#include <memory>

#include "rasm/instances.hpp"
#include "rasm/markov.hpp"
#include "rasm/rule_algebra.hpp"
#include "rasm/species.hpp"

using namespace rasm;

namespace {

const PRBTSystem& sys() {
    static PRBTSystem s = make_remy_system();
    return s;
}

const GenerationTable& table(int depth) {
    static std::map<int, GenerationTable> cache;
    auto it = cache.find(depth);
    if (it == cache.end())
        it = cache.emplace(depth, expand(sys().rules, make_initial_tree(sys().type_graph),
                                         depth, Semantics::SqPO, &sys().constraints))
                 .first;
    return it->second;
}

const TypedGraph& tree_at(int depth) {
    return table(depth).generations[depth].begin()->second.representative;
}

}  // namespace

static void BM_canonical_key(benchmark::State& state) {
    const TypedGraph& g = tree_at(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(canonical_key(g));
}
BENCHMARK(BM_canonical_key)->Arg(2)->Arg(4)->Arg(6)->Arg(8);

static void BM_admissible_matches(benchmark::State& state) {
    const TypedGraph& g = tree_at(static_cast<int>(state.range(0)));
    const Rule& split = sys().rules[0].rule;
    for (auto _ : state)
        benchmark::DoNotOptimize(admissible_matches(split, g, Semantics::SqPO));
}
BENCHMARK(BM_admissible_matches)->Arg(2)->Arg(4)->Arg(6)->Arg(8);

static void BM_derive_all(benchmark::State& state) {
    const TypedGraph& g = tree_at(static_cast<int>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(derive_all(sys().rules, g, Semantics::SqPO));
}
BENCHMARK(BM_derive_all)->Arg(2)->Arg(4)->Arg(6);

static void BM_expand(benchmark::State& state) {
    TypedGraph x0 = make_initial_tree(sys().type_graph);
    int depth = static_cast<int>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(
            expand(sys().rules, x0, depth, Semantics::SqPO, &sys().constraints));
}
BENCHMARK(BM_expand)->Arg(3)->Arg(4)->Arg(5)->Unit(benchmark::kMillisecond);

static void BM_represent_generator(benchmark::State& state) {
    auto basis = std::make_shared<StateBasis>(
        state_basis(table(static_cast<int>(state.range(0)))));
    FormalSum gen;
    for (const auto& wr : sys().rules) gen.add(wr.weight, wr.rule);
    for (auto _ : state)
        benchmark::DoNotOptimize(represent(gen, basis, Semantics::SqPO));
}
BENCHMARK(BM_represent_generator)->Arg(3)->Arg(4)->Arg(5)->Unit(benchmark::kMillisecond);

static void BM_dtmc_propagate(benchmark::State& state) {
    int jumps = static_cast<int>(state.range(0));
    TransitionSet ts{sys().rules, Semantics::SqPO};
    auto basis = std::make_shared<StateBasis>(state_basis(table(jumps + 1)));
    SparseOperator d = embedded_dtmc(ts, basis);
    TypedGraph x0 = make_initial_tree(sys().type_graph);
    for (auto _ : state) benchmark::DoNotOptimize(dtmc_propagate(d, x0, jumps));
}
BENCHMARK(BM_dtmc_propagate)->Arg(3)->Arg(5)->Arg(7)->Unit(benchmark::kMillisecond);

static void BM_ssa_trajectory(benchmark::State& state) {
    TransitionSet ts{sys().rules, Semantics::SqPO};
    TypedGraph x0 = make_initial_tree(sys().type_graph);
    SsaOptions opt;
    opt.max_steps = state.range(0);
    std::uint64_t seed = 1;
    for (auto _ : state) benchmark::DoNotOptimize(ssa_run(ts, x0, opt, seed++));
}
BENCHMARK(BM_ssa_trajectory)->Arg(5)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
