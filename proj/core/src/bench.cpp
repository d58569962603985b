#include "fern/bench.hpp"

#include "fern/error.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <thread>

namespace fern {

SweepMode parse_sweep_mode(const std::string& name) {
    if (name == "lookup") {
        return SweepMode::lookup;
    }
    if (name == "search_safe") {
        return SweepMode::search_safe;
    }
    if (name == "search_epsilon") {
        return SweepMode::search_epsilon;
    }
    throw ArgumentError("unknown sweep mode '" + name + "' (expected lookup, search_safe or search_epsilon)");
}

const char* to_string(SweepMode mode) noexcept {
    switch (mode) {
    case SweepMode::lookup:
        return "lookup";
    case SweepMode::search_safe:
        return "search_safe";
    case SweepMode::search_epsilon:
        return "search_epsilon";
    }
    return "unknown";
}

QuerySource parse_query_source(const std::string& name) {
    if (name == "sampled" || name == "sampled_from_db") {
        return QuerySource::sampled_from_db;
    }
    if (name == "external" || name == "external_file") {
        return QuerySource::external_file;
    }
    throw ArgumentError("unknown query source '" + name + "' (expected sampled or external)");
}

const char* to_string(QuerySource source) noexcept {
    return source == QuerySource::sampled_from_db ? "sampled_from_db" : "external_file";
}

double percentile_sorted(const std::vector<double>& sorted, double p) {
    if (sorted.empty()) {
        return 0.0;
    }
    const auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * static_cast<double>(sorted.size())));
    return sorted[std::clamp<std::size_t>(rank, 1, sorted.size()) - 1];
}

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    double sq_distance = 0.0;
    std::size_t visited = 0;
    double latency_ns = 0.0;
};

/// Runs `body(begin, end)` over [0, count) split into contiguous chunks, one per worker.
template <typename Body>
void fan_out(std::size_t count, std::size_t threads, Body&& body) {
    threads = std::max<std::size_t>(1, std::min(threads, count));
    if (threads == 1) {
        body(std::size_t{0}, count);
        return;
    }
    std::vector<std::thread> workers;
    workers.reserve(threads);
    const std::size_t chunk = (count + threads - 1) / threads;
    for (std::size_t t = 0; t < threads; ++t) {
        const std::size_t begin = std::min(count, t * chunk);
        const std::size_t end = std::min(count, begin + chunk);
        workers.emplace_back([&body, begin, end] { body(begin, end); });
    }
    for (auto& w : workers) {
        w.join();
    }
}

/// `count` distinct positions in [0, population), in ascending order.
std::vector<std::size_t> sample_positions(std::size_t population, std::size_t count, std::uint64_t seed) {
    std::vector<std::size_t> all(population);
    std::iota(all.begin(), all.end(), std::size_t{0});
    if (count >= population) {
        return all;
    }
    Rng rng(seed);
    for (std::size_t i = 0; i < count; ++i) {
        const auto j = i + static_cast<std::size_t>(rng.below(population - i));
        std::swap(all[i], all[j]);
    }
    all.resize(count);
    std::sort(all.begin(), all.end());
    return all;
}

void check_config(const SweepConfig& config, const FlatStore& data, const FlatStore* external) {
    if (config.sizes.empty()) {
        throw ArgumentError("sweep needs at least one size");
    }
    if (config.queries_per_size == 0) {
        throw ArgumentError("queries_per_size must be at least 1");
    }
    if (config.threads == 0) {
        throw ArgumentError("threads must be at least 1");
    }
    for (std::size_t i = 0; i < config.sizes.size(); ++i) {
        if (config.sizes[i] == 0) {
            throw ArgumentError("sweep sizes must be positive");
        }
        if (i > 0 && config.sizes[i] <= config.sizes[i - 1]) {
            throw ArgumentError("sweep sizes must be strictly ascending");
        }
    }
    if (config.sizes.back() > data.size()) {
        throw ArgumentError("sweep size " + std::to_string(config.sizes.back()) + " exceeds the dataset's " +
                            std::to_string(data.size()) + " vectors");
    }
    if (config.query_source == QuerySource::external_file) {
        if (external == nullptr || external->empty()) {
            throw ArgumentError("external queries requested but none were loaded");
        }
        if (external->dim() != data.dim()) {
            throw DimensionError("query dimension " + std::to_string(external->dim()) +
                                 " differs from dataset dimension " + std::to_string(data.dim()));
        }
    }
    if (config.mode == SweepMode::search_epsilon) {
        (void)BoundaryPredicate::within(config.epsilon);
    }
}

} // namespace

std::vector<BenchRecord> run_sweep(const SweepConfig& config, const FlatStore& data, const FlatStore* external_queries) {
    check_config(config, data, external_queries);

    BoundaryPredicate predicate = BoundaryPredicate::never();
    if (config.mode == SweepMode::search_safe) {
        predicate = BoundaryPredicate::safe();
    } else if (config.mode == SweepMode::search_epsilon) {
        predicate = BoundaryPredicate::within(config.epsilon);
    }

    FernIndex index(data.dim(), Metric::euclidean);
    index.reserve(config.sizes.back());
    double build_ms = 0.0;
    std::size_t built = 0;

    std::vector<BenchRecord> records;
    for (const std::size_t n : config.sizes) {
        // Insertion is deterministic, so growing one index reproduces a fresh build of every prefix.
        const auto build_start = Clock::now();
        for (; built < n; ++built) {
            index.insert(data[built]);
        }
        build_ms += std::chrono::duration<double, std::milli>(Clock::now() - build_start).count();

        const std::uint64_t size_seed = mix_seed(config.seed, n);
        std::vector<VectorView> queries;
        if (config.query_source == QuerySource::sampled_from_db) {
            Rng rng(size_seed);
            queries.reserve(config.queries_per_size);
            for (std::size_t i = 0; i < config.queries_per_size; ++i) {
                queries.push_back(data[static_cast<std::size_t>(rng.below(n))]);
            }
        } else {
            const std::size_t count = std::min(config.queries_per_size, external_queries->size());
            for (std::size_t i = 0; i < count; ++i) {
                queries.push_back((*external_queries)[i]);
            }
        }

        std::vector<Outcome> outcomes(queries.size());
        const auto wall_start = Clock::now();
        fan_out(queries.size(), config.threads, [&](std::size_t begin, std::size_t end) {
            for (std::size_t i = begin; i < end; ++i) {
                const auto t0 = Clock::now();
                const QueryResult r = config.mode == SweepMode::lookup
                                          ? index.lookup(queries[i])
                                          : index.search(queries[i], predicate, config.traversal);
                const auto t1 = Clock::now();
                outcomes[i] = {r.sq_distance, r.visited, std::chrono::duration<double, std::nano>(t1 - t0).count()};
            }
        });
        const double wall_s = std::chrono::duration<double>(Clock::now() - wall_start).count();

        const std::size_t oracle_count =
            n > config.oracle_full_limit ? std::min(config.oracle_sample, queries.size()) : queries.size();
        const auto checked = sample_positions(queries.size(), oracle_count, mix_seed(size_seed, 1));
        std::vector<char> hit(checked.size(), 0);
        fan_out(checked.size(), config.threads, [&](std::size_t begin, std::size_t end) {
            for (std::size_t i = begin; i < end; ++i) {
                const std::size_t qi = checked[i];
                hit[i] = scan_nn_prefix(data, n, queries[qi]).sq_distance == outcomes[qi].sq_distance ? 1 : 0;
            }
        });

        BenchRecord rec;
        rec.n = n;
        rec.d = data.dim();
        rec.mode = config.mode;
        rec.threads = config.threads;
        rec.build_ms = build_ms;
        rec.series = config.label;

        std::vector<double> latencies;
        latencies.reserve(outcomes.size());
        double visited_sum = 0.0;
        for (const Outcome& o : outcomes) {
            latencies.push_back(o.latency_ns);
            visited_sum += static_cast<double>(o.visited);
            rec.max_visited = std::max(rec.max_visited, o.visited);
        }
        rec.mean_visited = visited_sum / static_cast<double>(outcomes.size());
        rec.mean_ns = std::accumulate(latencies.begin(), latencies.end(), 0.0) / static_cast<double>(latencies.size());
        std::sort(latencies.begin(), latencies.end());
        rec.p50_ns = percentile_sorted(latencies, 50.0);
        rec.p99_ns = percentile_sorted(latencies, 99.0);
        rec.throughput_qps = wall_s > 0.0 ? static_cast<double>(outcomes.size()) / wall_s : 0.0;
        rec.oracle_checked = checked.size();
        rec.recall = checked.empty()
                         ? 0.0
                         : static_cast<double>(std::count(hit.begin(), hit.end(), 1)) / static_cast<double>(checked.size());
        records.push_back(std::move(rec));
    }
    return records;
}

std::vector<BenchRecord> run_sweep(const SweepConfig& config) {
    DatasetSpec spec = config.dataset;
    if (spec.source == DatasetSpec::Source::uniform_synthetic && spec.n == 0 && !config.sizes.empty()) {
        spec.n = *std::max_element(config.sizes.begin(), config.sizes.end());
    }
    const FlatStore data = load_dataset(spec);
    if (config.query_source == QuerySource::external_file) {
        const FlatStore queries = load_dataset(config.queries);
        return run_sweep(config, data, &queries);
    }
    return run_sweep(config, data);
}

} // namespace fern
