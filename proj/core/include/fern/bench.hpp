#ifndef FERN_BENCH_HPP
#define FERN_BENCH_HPP

#include "fern/datasets.hpp"
#include "fern/index.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

/**
 * @file bench.hpp
 *
 * @brief Scaling sweeps: build an index over growing prefixes of a dataset, time queries, and
 * record visited-node counts and recall against the linear-scan oracle.
 */

namespace fern {

enum class SweepMode : std::uint8_t { lookup, search_safe, search_epsilon };

/// @throws ArgumentError for an unknown name.
SweepMode parse_sweep_mode(const std::string& name);
const char* to_string(SweepMode mode) noexcept;

enum class QuerySource : std::uint8_t {
    /// Sampled with replacement from the vectors stored at each size.
    sampled_from_db,
    /// The leading rows of a separate vector file.
    external_file,
};

/// @throws ArgumentError for an unknown name.
QuerySource parse_query_source(const std::string& name);
const char* to_string(QuerySource source) noexcept;

struct SweepConfig {
    DatasetSpec dataset;
    /// Strictly ascending index sizes.
    std::vector<std::size_t> sizes;
    std::size_t queries_per_size = 1000;
    QuerySource query_source = QuerySource::sampled_from_db;
    /// Used when `query_source` is `external_file`.
    DatasetSpec queries;
    SweepMode mode = SweepMode::lookup;
    double epsilon = 0.0;
    Traversal traversal = Traversal::queue;
    std::uint64_t seed = 42;
    std::size_t threads = 1;
    /// Above this size, recall is measured on a seeded subsample of at most `oracle_sample` queries.
    std::size_t oracle_full_limit = 100000;
    std::size_t oracle_sample = 200;
    /// Series name for plots; empty means "d=<dim> <mode>".
    std::string label;
};

struct BenchRecord {
    std::size_t n = 0;
    std::size_t d = 0;
    SweepMode mode = SweepMode::lookup;
    double mean_ns = 0.0;
    double p50_ns = 0.0;
    double p99_ns = 0.0;
    double mean_visited = 0.0;
    std::size_t max_visited = 0;
    double recall = 0.0;
    double build_ms = 0.0;
    /// Aggregate over all worker threads.
    double throughput_qps = 0.0;
    std::size_t threads = 1;
    std::size_t oracle_checked = 0;
    /// Plot series; not part of the CSV/JSON schema.
    std::string series;
};

/**
 * Runs the sweep on an already loaded dataset. `external_queries` is required when the config
 * asks for external queries and ignored otherwise.
 *
 * @throws ArgumentError if a size exceeds the dataset or the config is inconsistent.
 */
std::vector<BenchRecord> run_sweep(const SweepConfig& config, const FlatStore& data,
                                   const FlatStore* external_queries = nullptr);

/// Loads the dataset (and external queries) named by the config, then runs the sweep.
std::vector<BenchRecord> run_sweep(const SweepConfig& config);

/// Header: n,d,mode,mean_ns,p50_ns,p99_ns,mean_visited,max_visited,recall,build_ms,throughput_qps
void emit_csv(const std::vector<BenchRecord>& records, std::ostream& out);
/// Array of objects keyed like the CSV columns.
void emit_json(const std::vector<BenchRecord>& records, std::ostream& out);
/// Mean latency against log10(n), one polyline per series. @throws ArgumentError for fewer than 2 records.
void emit_svg_plot(const std::vector<BenchRecord>& records, std::ostream& out);

/// Writes to a file path via the matching emitter. @throws IoError.
void write_report(const std::vector<BenchRecord>& records, const std::string& path,
                  void (*emit)(const std::vector<BenchRecord>&, std::ostream&));

/// A sweep config file plus the report destinations it names.
struct SweepFile {
    SweepConfig config;
    std::string csv_path;
    std::string json_path;
    std::string svg_path;
};

/**
 * Parses the `key = value` sweep format ('#' starts a comment). Relative paths are resolved
 * against `base_dir`. Unknown keys are errors.
 *
 * @throws ArgumentError with the offending line number.
 */
SweepFile parse_sweep_config(std::istream& in, const std::string& base_dir = "");

/// @throws IoError, ArgumentError.
SweepFile load_sweep_config(const std::string& path);

/// Nearest-rank percentile of an ascending sequence; `p` in (0, 100].
double percentile_sorted(const std::vector<double>& sorted, double p);

} // namespace fern

#endif
