#include "fixtures.hpp"

#include <gvnr/cooc.hpp>
#include <gvnr/trainer.hpp>
#include <gvnr/walks.hpp>

#include <benchmark/benchmark.h>

namespace {

using namespace gvnr;

const Graph& graph() {
    static const Graph g = testing::cora_scale_graph(1);
    return g;
}

const WalkCorpus& corpus() {
    static const WalkCorpus c = [] {
        WalkOptions o;
        o.walks_per_node = 20;
        return generate_walks(graph(), o);
    }();
    return c;
}

const CoocMatrix& matrix() {
    static const CoocMatrix x = apply_threshold(build_cooc(corpus(), graph().node_count(), 5), 1.0);
    return x;
}

void BM_SampleNeighbor(benchmark::State& state) {
    const Graph& g = graph();
    Rng rng(7);
    NodeIndex node = 0;
    for (auto _ : state) {
        node = sample_neighbor(g, node, rng);
        benchmark::DoNotOptimize(node);
    }
}
BENCHMARK(BM_SampleNeighbor);

void BM_GenerateWalks(benchmark::State& state) {
    WalkOptions o;
    o.walks_per_node = static_cast<std::size_t>(state.range(0));
    std::size_t visits = 0;
    for (auto _ : state) visits += generate_walks(graph(), o).total_visits();
    state.SetItemsProcessed(static_cast<std::int64_t>(visits));
}
BENCHMARK(BM_GenerateWalks)->Arg(5)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_BuildCooc(benchmark::State& state) {
    const auto window = static_cast<std::size_t>(state.range(0));
    const WalkCorpus& c = corpus();
    for (auto _ : state) benchmark::DoNotOptimize(build_cooc(c, graph().node_count(), window).nnz());
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * c.total_visits()));
}
BENCHMARK(BM_BuildCooc)->Arg(2)->Arg(5)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_TrainEpoch(benchmark::State& state) {
    TrainConfig cfg;
    cfg.dim = static_cast<std::size_t>(state.range(0));
    cfg.zero_ratio = static_cast<double>(state.range(1));
    cfg.epochs = 1;
    const CoocMatrix& x = matrix();
    std::size_t updates = 0;
    for (auto _ : state) updates += train(x, graph().ids(), cfg).history.front().updates();
    state.SetItemsProcessed(static_cast<std::int64_t>(updates));
}
BENCHMARK(BM_TrainEpoch)->Args({80, 0})->Args({80, 1})->Args({32, 1})->Unit(benchmark::kMillisecond);

void BM_SampleZeroEntries(benchmark::State& state) {
    const CoocMatrix& x = matrix();
    Rng rng(3);
    NodeIndex row = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(sample_zero_entries(x, row, 1.0, rng));
        row = (row + 1) % x.n();
    }
}
BENCHMARK(BM_SampleZeroEntries);

}  // namespace

BENCHMARK_MAIN();
