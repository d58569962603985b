#include "fern/datasets.hpp"
#include "fern/geometry.hpp"
#include "fern/index.hpp"
#include "fern/oracle.hpp"

#include <benchmark/benchmark.h>

#include <map>
#include <memory>

namespace {

constexpr std::size_t kDim = 128;
constexpr std::uint64_t kSeed = 42;

const fern::FlatStore& dataset(std::size_t n) {
    static std::map<std::size_t, fern::FlatStore> cache;
    auto it = cache.find(n);
    if (it == cache.end()) {
        it = cache.emplace(n, fern::gen_uniform(n, kDim, kSeed)).first;
    }
    return it->second;
}

const fern::FernIndex& index_of(std::size_t n) {
    static std::map<std::size_t, std::unique_ptr<fern::FernIndex>> cache;
    auto& slot = cache[n];
    if (!slot) {
        const auto& data = dataset(n);
        slot = std::make_unique<fern::FernIndex>(kDim);
        slot->reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            slot->insert(data[i]);
        }
    }
    return *slot;
}

void BM_SqDist(benchmark::State& state) {
    const auto dim = static_cast<std::size_t>(state.range(0));
    const auto v = fern::gen_uniform(2, dim, kSeed);
    for (auto _ : state) {
        benchmark::DoNotOptimize(fern::sq_dist(v[0], v[1]));
    }
}
BENCHMARK(BM_SqDist)->Arg(2)->Arg(128)->Arg(784);

void BM_Build(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto& data = dataset(n);
    for (auto _ : state) {
        fern::FernIndex index(kDim);
        index.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            index.insert(data[i]);
        }
        benchmark::DoNotOptimize(index.size());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}
BENCHMARK(BM_Build)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_Lookup(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto& index = index_of(n);
    const auto& data = dataset(n);
    fern::Rng rng(kSeed);
    std::size_t visited = 0;
    for (auto _ : state) {
        const auto r = index.lookup(data[rng.below(n)]);
        visited += r.visited;
        benchmark::DoNotOptimize(r.node);
    }
    state.counters["visited"] = benchmark::Counter(static_cast<double>(visited), benchmark::Counter::kAvgIterations);
}
BENCHMARK(BM_Lookup)->RangeMultiplier(10)->Range(1000, 100000);

void BM_SafeSearch(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto& index = index_of(n);
    const auto queries = fern::gen_uniform(256, kDim, kSeed + 1);
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(index.search(queries[i++ % queries.size()], fern::BoundaryPredicate::safe()).node);
    }
}
BENCHMARK(BM_SafeSearch)->Arg(1000)->Arg(10000);

void BM_ScanNn(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto& data = dataset(n);
    fern::Rng rng(kSeed);
    for (auto _ : state) {
        benchmark::DoNotOptimize(fern::scan_nn(data, data[rng.below(n)]).index);
    }
}
BENCHMARK(BM_ScanNn)->Arg(1000)->Arg(10000);

} // namespace

BENCHMARK_MAIN();
