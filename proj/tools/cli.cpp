#include "cli.hpp"

#include "fern/bench.hpp"
#include "fern/datasets.hpp"
#include "fern/error.hpp"
#include "fern/geometry.hpp"
#include "fern/index.hpp"
#include "fern/oracle.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <fstream>
#include <optional>
#include <ostream>

namespace fern::cli {

namespace {

using Clock = std::chrono::steady_clock;

/// Shortest round-trip form, always with a fractional part or exponent.
std::string real(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    std::string s(buf, res.ptr);
    if (s.find_first_of(".eni") == std::string::npos) {
        s += ".0";
    }
    return s;
}

double elapsed_ms(Clock::time_point since) {
    return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

DatasetSpec file_spec(const std::string& path, const std::string& format, const std::string& split) {
    DatasetSpec spec;
    spec.path = path;
    spec.source = format.empty() ? source_for_path(path) : parse_source(format);
    if (spec.source == DatasetSpec::Source::uniform_synthetic) {
        throw ArgumentError("'" + format + "' is not a file format");
    }
    spec.split = parse_split(split);
    return spec;
}

struct GenArgs {
    std::size_t n = 0;
    std::size_t d = 0;
    std::uint64_t seed = 42;
    std::string out;
};

struct BuildArgs {
    std::string input;
    std::string format;
    std::string split = "train";
    std::string metric = "euclidean";
    std::string out;
};

struct QueryArgs {
    std::string index;
    std::string query_file;
    std::string query_format;
    std::string split = "test";
    std::size_t sample = 0;
    std::uint64_t seed = 42;
    std::string mode = "safe";
    std::string traversal = "queue";
    bool summary_only = false;
};

struct SweepArgs {
    std::string config;
    std::string csv;
    std::string json;
    std::string svg;
};

struct ConvertArgs {
    std::string from;
    std::string to;
    std::string input;
    std::string output;
    std::string split = "train";
};

int cmd_gen(const GenArgs& a, std::ostream& out) {
    const auto store = gen_uniform(a.n, a.d, a.seed);
    write_raw(store, a.out);
    const auto stem = raw_stem(a.out);
    out << "wrote " << stem << ".f32 and " << stem << ".json (n=" << store.size() << " d=" << store.dim() << ")\n";
    return kExitOk;
}

int cmd_build(const BuildArgs& a, std::ostream& out) {
    const auto data = load_dataset(file_spec(a.input, a.format, a.split));
    if (data.empty()) {
        throw FormatError(a.input + ": no vectors to index");
    }
    FernIndex index(data.dim(), parse_metric(a.metric));
    index.reserve(data.size());
    const auto start = Clock::now();
    std::size_t max_depth = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        max_depth = std::max(max_depth, index.insert(data[i]));
    }
    const double build_ms = elapsed_ms(start);
    index.save(a.out);
    out << "n=" << index.size() << " d=" << index.dim() << " metric=" << to_string(index.metric())
        << " build_ms=" << real(build_ms) << " max_depth=" << max_depth << '\n';
    return kExitOk;
}

/// Stored vectors in node order; the ground truth for recall.
FlatStore stored_vectors(const FernIndex& index) {
    FlatStore store(index.dim());
    store.reserve(index.size());
    for (NodeId id = 0; id < index.size(); ++id) {
        store.push_back(index.vector(id));
    }
    return store;
}

int cmd_query(const QueryArgs& a, bool search, std::ostream& out) {
    if (a.query_file.empty() == (a.sample == 0)) {
        throw ArgumentError("exactly one of --query-file or --sample is required");
    }
    const BoundaryPredicate predicate = parse_predicate(a.mode);
    const Traversal traversal = parse_traversal(a.traversal);
    const auto index = FernIndex::load(a.index);
    const FlatStore truth = stored_vectors(index);

    FlatStore queries(index.dim());
    if (a.sample > 0) {
        Rng rng(a.seed);
        queries.reserve(a.sample);
        for (std::size_t i = 0; i < a.sample; ++i) {
            queries.push_back(truth[rng.below(truth.size())]);
        }
    } else {
        queries = load_dataset(file_spec(a.query_file, a.query_format, a.split));
        if (queries.empty()) {
            throw FormatError(a.query_file + ": no query vectors");
        }
        if (queries.dim() != index.dim()) {
            throw DimensionError("query dimension " + std::to_string(queries.dim()) + " does not match index dimension " +
                                 std::to_string(index.dim()));
        }
    }

    std::vector<double> latency(queries.size());
    std::size_t hits = 0;
    std::size_t visited_sum = 0;
    std::size_t visited_max = 0;
    if (!a.summary_only) {
        out << "qid,sq_distance,visited\n";
    }
    double total_ns = 0.0;
    Vector unit;
    for (std::size_t qi = 0; qi < queries.size(); ++qi) {
        const auto q = queries[qi];
        const auto start = Clock::now();
        const QueryResult r = search ? index.search(q, predicate, traversal) : index.lookup(q);
        latency[qi] = std::chrono::duration<double, std::nano>(Clock::now() - start).count();
        total_ns += latency[qi];

        VectorView oracle_query = q;
        if (index.metric() == Metric::cosine) {
            unit = normalize(q);
            oracle_query = unit;
        }
        if (scan_nn(truth, oracle_query).sq_distance == r.sq_distance) {
            ++hits;
        }
        visited_sum += r.visited;
        visited_max = std::max(visited_max, r.visited);
        if (!a.summary_only) {
            out << qi << ',' << real(r.sq_distance) << ',' << r.visited << '\n';
        }
    }

    const double count = static_cast<double>(queries.size());
    std::sort(latency.begin(), latency.end());
    out << "summary queries=" << queries.size() << " recall=" << real(static_cast<double>(hits) / count)
        << " mean_visited=" << real(static_cast<double>(visited_sum) / count) << " max_visited=" << visited_max
        << " mean_ns=" << real(total_ns / count) << " p50_ns=" << real(percentile_sorted(latency, 50))
        << " p99_ns=" << real(percentile_sorted(latency, 99)) << " throughput_qps=" << real(count / (total_ns * 1e-9))
        << '\n';
    return kExitOk;
}

int cmd_stats(const std::string& path, std::ostream& out) {
    const auto index = FernIndex::load(path);
    const auto depth = index.depth_stats();
    const auto between = index.in_between_fraction();
    out << "n=" << index.size() << '\n'
        << "d=" << index.dim() << '\n'
        << "metric=" << to_string(index.metric()) << '\n'
        << "mean_depth=" << real(depth.mean_depth) << '\n'
        << "max_depth=" << depth.max_depth << '\n'
        << "in_between_fraction=" << real(between.aggregate) << '\n'
        << "depth,count\n";
    for (const auto& [level, count] : depth.histogram) {
        out << level << ',' << count << '\n';
    }
    return kExitOk;
}

int cmd_sweep(const SweepArgs& a, std::ostream& out, std::ostream& err) {
    auto file = load_sweep_config(a.config);
    for (auto [override_path, target] : {std::pair{&a.csv, &file.csv_path}, std::pair{&a.json, &file.json_path},
                                         std::pair{&a.svg, &file.svg_path}}) {
        if (!override_path->empty()) {
            *target = *override_path;
        }
    }
    const auto records = run_sweep(file.config);
    emit_csv(records, out);
    for (const auto& r : records) {
        err << "n=" << r.n << " threads=" << r.threads << " aggregate_qps=" << real(r.throughput_qps)
            << " per_thread_qps=" << real(r.throughput_qps / static_cast<double>(r.threads)) << '\n';
    }
    if (!file.csv_path.empty()) {
        write_report(records, file.csv_path, emit_csv);
        err << "wrote " << file.csv_path << '\n';
    }
    if (!file.json_path.empty()) {
        write_report(records, file.json_path, emit_json);
        err << "wrote " << file.json_path << '\n';
    }
    if (!file.svg_path.empty()) {
        if (records.size() < 2) {
            err << "skipping plot: needs at least two sizes\n";
        } else {
            write_report(records, file.svg_path, emit_svg_plot);
            err << "wrote " << file.svg_path << '\n';
        }
    }
    return kExitOk;
}

int cmd_convert(const ConvertArgs& a, std::ostream& out) {
    const auto data = load_dataset(file_spec(a.input, a.from, a.split));
    if (a.to == "fvecs") {
        write_fvecs(data, a.output);
    } else {
        write_raw(data, a.output);
    }
    out << "converted n=" << data.size() << " d=" << data.dim() << " " << a.from << " -> " << a.to << '\n';
    return kExitOk;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"FERN vector index: build, query and benchmark", "fern"};
    app.require_subcommand(1, 1);

    GenArgs gen_args;
    auto* gen = app.add_subcommand("gen", "Write a uniform [-1,1) dataset in raw format");
    gen->add_option("--n", gen_args.n, "Number of vectors")->required()->check(CLI::PositiveNumber);
    gen->add_option("--d", gen_args.d, "Dimension")->required()->check(CLI::PositiveNumber);
    gen->add_option("--seed", gen_args.seed, "Generator seed")->capture_default_str();
    gen->add_option("--out", gen_args.out, "Output stem; writes <stem>.f32 and <stem>.json")->required();

    BuildArgs build_args;
    auto* build = app.add_subcommand("build", "Build an index by inserting vectors in file order");
    build->add_option("--input", build_args.input, "Dataset file (.fvecs, .hdf5, raw stem)")->required();
    build->add_option("--format", build_args.format, "Override format detection")
        ->check(CLI::IsMember({"fvecs", "raw", "hdf5"}));
    build->add_option("--split", build_args.split, "HDF5 dataset to read")
        ->check(CLI::IsMember({"train", "test"}))
        ->capture_default_str();
    build->add_option("--metric", build_args.metric, "euclidean or cosine")
        ->check(CLI::IsMember({"euclidean", "cosine"}))
        ->capture_default_str();
    build->add_option("--out", build_args.out, "Index file to write")->required();

    QueryArgs lookup_args;
    QueryArgs search_args;
    auto add_query_options = [](CLI::App* cmd, QueryArgs& q) {
        cmd->add_option("--index", q.index, "Index file")->required();
        auto* file = cmd->add_option("--query-file", q.query_file, "Query vectors (.fvecs, .hdf5, raw stem)");
        auto* sample = cmd->add_option("--sample", q.sample, "Sample k stored vectors with replacement")
                           ->check(CLI::PositiveNumber);
        file->excludes(sample);
        cmd->add_option("--query-format", q.query_format, "Override query format detection")
            ->check(CLI::IsMember({"fvecs", "raw", "hdf5"}));
        cmd->add_option("--split", q.split, "HDF5 dataset holding the queries")
            ->check(CLI::IsMember({"train", "test"}))
            ->capture_default_str();
        cmd->add_option("--seed", q.seed, "Sampling seed")->capture_default_str();
        cmd->add_flag("--summary-only", q.summary_only, "Print only the summary line");
    };
    auto* lookup = app.add_subcommand("lookup", "Exact lookup of stored vectors");
    add_query_options(lookup, lookup_args);
    auto* search = app.add_subcommand("search", "Nearest-neighbor search with a boundary predicate");
    add_query_options(search, search_args);
    search->add_option("--mode", search_args.mode, "safe, never or eps:<float>")->capture_default_str();
    search->add_option("--traversal", search_args.traversal, "queue or stack")
        ->check(CLI::IsMember({"queue", "stack"}))
        ->capture_default_str();

    std::string stats_index;
    auto* stats = app.add_subcommand("stats", "Depth statistics and in-between fraction of an index");
    stats->add_option("--index", stats_index, "Index file")->required();

    SweepArgs sweep_args;
    auto* sweep = app.add_subcommand("sweep", "Run a scaling sweep described by a config file");
    sweep->add_option("--config", sweep_args.config, "Sweep config file")->required();
    sweep->add_option("--csv", sweep_args.csv, "Override the CSV report path");
    sweep->add_option("--json", sweep_args.json, "Override the JSON report path");
    sweep->add_option("--svg", sweep_args.svg, "Override the SVG plot path");

    ConvertArgs convert_args;
    auto* convert = app.add_subcommand("convert", "Rewrite a dataset in another format");
    convert->add_option("--from", convert_args.from, "Input format")
        ->required()
        ->check(CLI::IsMember({"fvecs", "raw", "hdf5"}));
    convert->add_option("--to", convert_args.to, "Output format")->required()->check(CLI::IsMember({"fvecs", "raw"}));
    convert->add_option("--input", convert_args.input, "Input file")->required();
    convert->add_option("--output", convert_args.output, "Output file or raw stem")->required();
    convert->add_option("--split", convert_args.split, "HDF5 dataset to read")
        ->check(CLI::IsMember({"train", "test"}))
        ->capture_default_str();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (gen->parsed()) {
            return cmd_gen(gen_args, out);
        }
        if (build->parsed()) {
            return cmd_build(build_args, out);
        }
        if (lookup->parsed()) {
            return cmd_query(lookup_args, false, out);
        }
        if (search->parsed()) {
            return cmd_query(search_args, true, out);
        }
        if (stats->parsed()) {
            return cmd_stats(stats_index, out);
        }
        if (sweep->parsed()) {
            return cmd_sweep(sweep_args, out, err);
        }
        return cmd_convert(convert_args, out);
    } catch (const ArgumentError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
}

} // namespace fern::cli
