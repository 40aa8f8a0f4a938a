#include <benchmark/benchmark.h>

#include "omlab/bundled.hpp"
#include "omlab/equivalence.hpp"
#include "omlab/oracle.hpp"
#include "omlab/simulator.hpp"
#include "omlab/solvability.hpp"

using namespace omlab;

namespace {

EventFamily q3(std::size_t f) {
    return generate_bounded_omissions(share(hypercube(3)), f, OmissionMetric::global);
}

void BM_VertexConnectivityHypercube(benchmark::State& state) {
    Digraph g = hypercube(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(vertex_connectivity(g));
    }
}
BENCHMARK(BM_VertexConnectivityHypercube)->DenseRange(2, 5);

void BM_GenerateQ3(benchmark::State& state) {
    GraphPtr g = share(hypercube(3));
    for (auto _ : state) {
        benchmark::DoNotOptimize(generate_bounded_omissions(g, static_cast<std::size_t>(state.range(0)),
                                                            OmissionMetric::global));
    }
}
BENCHMARK(BM_GenerateQ3)->DenseRange(1, 3);

void BM_BetaPartitionQ3(benchmark::State& state) {
    EventFamily f = q3(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(beta_partition(f));
    }
    state.counters["events"] = static_cast<double>(f.size());
}
BENCHMARK(BM_BetaPartitionQ3)->DenseRange(1, 3)->Unit(benchmark::kMillisecond);

void BM_BroadcastGameQ3(benchmark::State& state) {
    EventFamily f = q3(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(optimal_broadcast_rounds(f));
    }
}
BENCHMARK(BM_BroadcastGameQ3)->DenseRange(1, 3)->Unit(benchmark::kMillisecond);

void BM_CheckConsensusQ3(benchmark::State& state) {
    EventFamily f = q3(2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(check_consensus(f));
    }
}
BENCHMARK(BM_CheckConsensusQ3)->Unit(benchmark::kMillisecond);

void BM_OracleCycle4(benchmark::State& state) {
    EventFamily f = generate_bounded_omissions(share(cycle_graph(4)), 1, OmissionMetric::global);
    for (auto _ : state) {
        benchmark::DoNotOptimize(min_consensus_rounds(f, static_cast<std::size_t>(state.range(0))));
    }
}
BENCHMARK(BM_OracleCycle4)->DenseRange(1, 3)->Unit(benchmark::kMillisecond);

void BM_OracleTwoNode(benchmark::State& state) {
    EventFamily f = bundled_family("O1-2node");
    for (auto _ : state) {
        benchmark::DoNotOptimize(min_consensus_rounds(f, static_cast<std::size_t>(state.range(0))));
    }
}
BENCHMARK(BM_OracleTwoNode)->DenseRange(2, 8, 2)->Unit(benchmark::kMillisecond);

void BM_ExhaustiveFig12(benchmark::State& state) {
    EventFamily f = fig12_family();
    auto p = broadcast_consensus(*f.base().find("c"), 2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(exhaustive_check(*p, f, static_cast<std::size_t>(state.range(0))));
    }
}
BENCHMARK(BM_ExhaustiveFig12)->DenseRange(2, 6, 2)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
