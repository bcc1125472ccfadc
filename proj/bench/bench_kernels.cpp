#include "trustnet/bicm.hpp"
#include "trustnet/projection.hpp"
#include "trustnet/random.hpp"

#include <benchmark/benchmark.h>

#include <map>

using namespace trustnet;

namespace {

BipartiteGraph graph(std::size_t users)
{
    Rng rng(users);
    std::vector<std::pair<Index, Index>> e;
    const std::size_t urls = 5 * users;
    for (Index i = 0; i < users; ++i)
        for (Index a = 0; a < urls; ++a)
            if (rng.bernoulli(0.01))
                e.emplace_back(i, a);
    return BipartiteGraph::from_edges(users, urls, e).pruned();
}

struct Fixture {
    BipartiteGraph g;
    BicmModel model;
    std::vector<Cooccurrence> pairs;

    explicit Fixture(std::size_t users) : g(graph(users)), model(solve(g)), pairs(cooccurrences(g)) {}
};

const Fixture& fixture(std::size_t users)
{
    static std::map<std::size_t, Fixture> cache;
    auto it = cache.find(users);
    if (it == cache.end())
        it = cache.try_emplace(users, users).first;
    return it->second;
}

void BM_solve(benchmark::State& state)
{
    const auto& f = fixture(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(solve(f.g));
}

void BM_cooccurrences_serial(benchmark::State& state)
{
    const auto& f = fixture(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(serial::cooccurrences(f.g));
}

void BM_cooccurrences_omp(benchmark::State& state)
{
    const auto& f = fixture(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(cooccurrences(f.g));
}

void BM_pair_tests_serial(benchmark::State& state)
{
    const auto& f = fixture(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(serial::pair_tests(f.model, f.pairs));
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * f.pairs.size()));
}

void BM_pair_tests_omp(benchmark::State& state)
{
    const auto& f = fixture(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(pair_tests(f.model, f.pairs));
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * f.pairs.size()));
}

} // namespace

BENCHMARK(BM_solve)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_cooccurrences_serial)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_cooccurrences_omp)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_pair_tests_serial)->Arg(200)->Arg(500)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_pair_tests_omp)->Arg(200)->Arg(500)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
