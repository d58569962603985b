#include "fern/bench.hpp"
#include "fern/error.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <cmath>
#include <regex>
#include <sstream>

using namespace fern;

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) {
        out.push_back(item);
    }
    return out;
}

BenchRecord sample_record(std::size_t n, std::size_t d = 128) {
    BenchRecord r;
    r.n = n;
    r.d = d;
    r.mode = SweepMode::lookup;
    r.mean_ns = 1234.5678 + static_cast<double>(n) / 1000.0;
    r.p50_ns = 1200.25;
    r.p99_ns = 2000.125;
    r.mean_visited = 13.476;
    r.max_visited = 20;
    r.recall = 1.0;
    r.build_ms = 81.315365;
    r.throughput_qps = 130814.45735219766;
    return r;
}

/// Every opening tag is closed in order (self-closing tags excluded).
bool balanced_xml(const std::string& svg) {
    std::vector<std::string> stack;
    const std::regex tag(R"(<(/?)([a-zA-Z]+)[^>]*?(/?)>)");
    for (auto it = std::sregex_iterator(svg.begin(), svg.end(), tag); it != std::sregex_iterator(); ++it) {
        const auto& m = *it;
        if (m[3] == "/") {
            continue;
        }
        if (m[1] == "/") {
            if (stack.empty() || stack.back() != m[2]) {
                return false;
            }
            stack.pop_back();
        } else {
            stack.push_back(m[2]);
        }
    }
    return stack.empty();
}

std::size_t count_of(const std::string& haystack, const std::string& needle) {
    std::size_t count = 0;
    for (auto pos = haystack.find(needle); pos != std::string::npos; pos = haystack.find(needle, pos + 1)) {
        ++count;
    }
    return count;
}

} // namespace

TEST(RunSweep, LookupRecallIsOneAcrossSizes) {
    const auto data = gen_uniform(100000, 128, 42);
    SweepConfig c;
    c.sizes = {10000, 100000};
    const auto records = run_sweep(c, data);
    ASSERT_EQ(records.size(), 2u);
    for (const auto& r : records) {
        EXPECT_EQ(r.recall, 1.0);
        EXPECT_EQ(r.d, 128u);
        EXPECT_EQ(r.oracle_checked, 1000u);
        EXPECT_LE(r.p50_ns, r.p99_ns);
        EXPECT_LE(r.mean_visited, static_cast<double>(r.n));
    }
    EXPECT_LT(records[0].build_ms, records[1].build_ms);
}

TEST(RunSweep, SingleQueryHasEqualPercentiles) {
    const auto data = gen_uniform(100, 8, 1);
    for (auto mode : {SweepMode::lookup, SweepMode::search_safe, SweepMode::search_epsilon}) {
        SweepConfig c;
        c.sizes = {100};
        c.queries_per_size = 1;
        c.mode = mode;
        c.epsilon = 0.1;
        const auto records = run_sweep(c, data);
        ASSERT_EQ(records.size(), 1u);
        EXPECT_EQ(records[0].p50_ns, records[0].p99_ns);
        EXPECT_EQ(records[0].mode, mode);
    }
}

TEST(RunSweep, OracleSubsampleAboveLimit) {
    const auto data = gen_uniform(3000, 8, 2);
    SweepConfig c;
    c.sizes = {1000, 3000};
    c.oracle_full_limit = 2000;
    c.oracle_sample = 50;
    const auto records = run_sweep(c, data);
    EXPECT_EQ(records[0].oracle_checked, 1000u);
    EXPECT_EQ(records[1].oracle_checked, 50u);
    EXPECT_EQ(records[1].recall, 1.0);
}

TEST(RunSweep, DeterministicCountsAcrossRunsAndThreads) {
    const auto data = gen_uniform(20000, 16, 3);
    SweepConfig c;
    c.sizes = {2000, 20000};
    c.queries_per_size = 300;
    c.seed = 9;
    const auto a = run_sweep(c, data);
    const auto b = run_sweep(c, data);
    c.threads = 3;
    const auto t = run_sweep(c, data);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].recall, b[i].recall);
        EXPECT_EQ(a[i].mean_visited, b[i].mean_visited);
        EXPECT_EQ(a[i].max_visited, b[i].max_visited);
        EXPECT_EQ(a[i].mean_visited, t[i].mean_visited);
        EXPECT_EQ(a[i].max_visited, t[i].max_visited);
        EXPECT_EQ(a[i].recall, t[i].recall);
    }
    c.threads = 1;
    c.seed = 10;
    EXPECT_NE(run_sweep(c, data)[1].mean_visited, a[1].mean_visited);
}

TEST(RunSweep, ThroughputConsistentWithLatency) {
    const auto data = gen_uniform(10000, 128, 4);
    SweepConfig c;
    c.sizes = {10000};
    c.queries_per_size = 3000;
    const auto r = run_sweep(c, data)[0];
    EXPECT_NEAR(r.throughput_qps * r.mean_ns, 1e9 * static_cast<double>(c.threads), 0.2e9);
}

TEST(RunSweep, SafeSearchOnExternalQueries) {
    const auto data = gen_uniform(5000, 8, 5);
    const auto queries = gen_uniform(100, 8, 6);
    SweepConfig c;
    c.sizes = {500, 5000};
    c.mode = SweepMode::search_safe;
    c.query_source = QuerySource::external_file;
    for (auto traversal : {Traversal::queue, Traversal::stack}) {
        c.traversal = traversal;
        const auto records = run_sweep(c, data, &queries);
        for (const auto& r : records) {
            EXPECT_EQ(r.recall, 1.0);
            EXPECT_EQ(r.oracle_checked, 100u);
        }
    }
}

TEST(RunSweep, ConfigErrors) {
    const auto data = gen_uniform(100, 4, 7);
    SweepConfig c;
    c.sizes = {50, 200};
    EXPECT_THROW(run_sweep(c, data), ArgumentError);
    c.sizes = {50, 50};
    EXPECT_THROW(run_sweep(c, data), ArgumentError);
    c.sizes = {};
    EXPECT_THROW(run_sweep(c, data), ArgumentError);
    c.sizes = {50};
    c.queries_per_size = 0;
    EXPECT_THROW(run_sweep(c, data), ArgumentError);
    c.queries_per_size = 10;
    c.query_source = QuerySource::external_file;
    EXPECT_THROW(run_sweep(c, data), ArgumentError);
    const auto wrong_dim = gen_uniform(5, 3, 1);
    EXPECT_THROW(run_sweep(c, data, &wrong_dim), DimensionError);
    c.query_source = QuerySource::sampled_from_db;
    c.mode = SweepMode::search_epsilon;
    c.epsilon = -1.0;
    EXPECT_THROW(run_sweep(c, data), ArgumentError);
}

TEST(RunSweep, LoadsSyntheticDatasetFromConfig) {
    SweepConfig c;
    c.dataset.dim = 8;
    c.dataset.seed = 11;
    c.sizes = {100, 1000};
    c.queries_per_size = 50;
    const auto records = run_sweep(c);
    ASSERT_EQ(records.size(), 2u);
    EXPECT_EQ(records[1].n, 1000u);
    EXPECT_EQ(records[1].recall, 1.0);
}

TEST(Percentile, NearestRank) {
    const std::vector<double> v{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    EXPECT_EQ(percentile_sorted(v, 50), 5);
    EXPECT_EQ(percentile_sorted(v, 99), 10);
    EXPECT_EQ(percentile_sorted({7}, 99), 7);
}

TEST(EmitCsv, OneRecordTwoLines) {
    std::ostringstream out;
    emit_csv({sample_record(1000)}, out);
    const auto lines = split(out.str(), '\n');
    ASSERT_EQ(lines.size(), 2u);
    EXPECT_EQ(lines[0], "n,d,mode,mean_ns,p50_ns,p99_ns,mean_visited,max_visited,recall,build_ms,throughput_qps");
}

TEST(EmitCsv, ReparsesToSameValues) {
    const auto r = sample_record(10000);
    std::ostringstream out;
    emit_csv({r}, out);
    const auto fields = split(split(out.str(), '\n')[1], ',');
    ASSERT_EQ(fields.size(), 11u);
    EXPECT_EQ(std::stoull(fields[0]), r.n);
    EXPECT_EQ(std::stoull(fields[1]), r.d);
    EXPECT_EQ(fields[2], "lookup");
    EXPECT_EQ(std::stod(fields[3]), r.mean_ns);
    EXPECT_EQ(std::stod(fields[4]), r.p50_ns);
    EXPECT_EQ(std::stod(fields[5]), r.p99_ns);
    EXPECT_EQ(std::stod(fields[6]), r.mean_visited);
    EXPECT_EQ(std::stoull(fields[7]), r.max_visited);
    EXPECT_EQ(std::stod(fields[8]), r.recall);
    EXPECT_EQ(std::stod(fields[9]), r.build_ms);
    EXPECT_EQ(std::stod(fields[10]), r.throughput_qps);
}

TEST(EmitCsv, SweepRowsAscend) {
    const auto data = gen_uniform(4000, 8, 12);
    SweepConfig c;
    c.sizes = {500, 1000, 2000, 4000};
    c.queries_per_size = 20;
    std::ostringstream out;
    emit_csv(run_sweep(c, data), out);
    const auto lines = split(out.str(), '\n');
    ASSERT_EQ(lines.size(), 5u);
    std::size_t prev = 0;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto n = std::stoull(split(lines[i], ',')[0]);
        EXPECT_GT(n, prev);
        prev = n;
    }
}

TEST(EmitJson, SameKeysAsCsv) {
    std::ostringstream out;
    emit_json({sample_record(1000), sample_record(2000)}, out);
    const auto parsed = nlohmann::json::parse(out.str());
    ASSERT_TRUE(parsed.is_array());
    ASSERT_EQ(parsed.size(), 2u);
    std::vector<std::string> keys;
    for (const auto& [k, v] : parsed[0].items()) {
        keys.push_back(k);
    }
    std::sort(keys.begin(), keys.end());
    std::vector<std::string> expected{"n", "d", "mode", "mean_ns", "p50_ns", "p99_ns", "mean_visited",
                                      "max_visited", "recall", "build_ms", "throughput_qps"};
    std::sort(expected.begin(), expected.end());
    EXPECT_EQ(keys, expected);
    EXPECT_EQ(parsed[1]["n"].get<std::size_t>(), 2000u);
    EXPECT_EQ(parsed[0]["throughput_qps"].get<double>(), sample_record(1000).throughput_qps);
}

TEST(EmitSvg, TwoRecordsOnePolyline) {
    std::ostringstream out;
    emit_svg_plot({sample_record(1000), sample_record(100000)}, out);
    const auto svg = out.str();
    EXPECT_EQ(count_of(svg, "<polyline"), 1u);
    const std::regex points(R"re(points="([^"]*)")re");
    std::smatch m;
    ASSERT_TRUE(std::regex_search(svg, m, points));
    EXPECT_EQ(split(m[1], ' ').size(), 2u);
    EXPECT_TRUE(balanced_xml(svg));
    EXPECT_NE(svg.find("<svg"), std::string::npos);
    EXPECT_NE(svg.find("</svg>"), std::string::npos);
}

TEST(EmitSvg, OnePolylinePerSeries) {
    auto a1 = sample_record(1000, 784);
    auto a2 = sample_record(10000, 784);
    auto b1 = sample_record(1000, 784);
    auto b2 = sample_record(10000, 784);
    a1.series = a2.series = "mnist";
    b1.series = b2.series = "fashion-mnist <784>";
    std::ostringstream out;
    emit_svg_plot({a1, a2, b1, b2}, out);
    EXPECT_EQ(count_of(out.str(), "<polyline"), 2u);
    EXPECT_TRUE(balanced_xml(out.str()));
    EXPECT_NE(out.str().find("&lt;784&gt;"), std::string::npos);

    auto c = sample_record(1000, 128);
    c.mode = SweepMode::search_safe;
    std::ostringstream grouped;
    emit_svg_plot({sample_record(1000), sample_record(2000), c, sample_record(1000, 2)}, grouped);
    EXPECT_EQ(count_of(grouped.str(), "<polyline"), 3u);
}

TEST(EmitSvg, NeedsTwoRecords) {
    std::ostringstream out;
    EXPECT_THROW(emit_svg_plot({sample_record(1000)}, out), ArgumentError);
    EXPECT_THROW(emit_svg_plot({}, out), ArgumentError);
}

TEST(SweepConfigFile, ParsesAllKeys) {
    std::istringstream in(R"(# scaling sweep
dataset = uniform
dim = 128
seed = 7
sizes = 1e3, 10000,1e5   # decades
queries = 500
mode = search_epsilon
epsilon = 0.05
traversal = stack
threads = 2
label = uniform-128
csv = out/sweep.csv
json = /abs/sweep.json
svg = sweep.svg
)");
    const auto f = parse_sweep_config(in, "/base");
    EXPECT_EQ(f.config.dataset.source, DatasetSpec::Source::uniform_synthetic);
    EXPECT_EQ(f.config.dataset.dim, 128u);
    EXPECT_EQ(f.config.dataset.seed, 7u);
    EXPECT_EQ(f.config.seed, 7u);
    EXPECT_EQ(f.config.sizes, (std::vector<std::size_t>{1000, 10000, 100000}));
    EXPECT_EQ(f.config.queries_per_size, 500u);
    EXPECT_EQ(f.config.mode, SweepMode::search_epsilon);
    EXPECT_EQ(f.config.epsilon, 0.05);
    EXPECT_EQ(f.config.traversal, Traversal::stack);
    EXPECT_EQ(f.config.threads, 2u);
    EXPECT_EQ(f.config.label, "uniform-128");
    EXPECT_EQ(f.config.queries.split, Split::test);

    std::istringstream defaults("dim = 4\nsizes = 10\n");
    EXPECT_EQ(parse_sweep_config(defaults).config.dataset.seed, 42u);
    EXPECT_EQ(f.csv_path, "/base/out/sweep.csv");
    EXPECT_EQ(f.json_path, "/abs/sweep.json");
    EXPECT_EQ(f.svg_path, "/base/sweep.svg");
}

TEST(SweepConfigFile, FileDatasetWithExternalQueries) {
    std::istringstream in(R"(
dataset = hdf5
path = data/mnist.hdf5
split = train
sizes = 600, 6000, 60000
query_source = external
query_path = data/mnist.hdf5
query_split = test
mode = search_safe
)");
    const auto f = parse_sweep_config(in, "cfg");
    EXPECT_EQ(f.config.dataset.source, DatasetSpec::Source::hdf5_file);
    EXPECT_EQ(f.config.dataset.path, "cfg/data/mnist.hdf5");
    EXPECT_EQ(f.config.query_source, QuerySource::external_file);
    EXPECT_EQ(f.config.queries.source, DatasetSpec::Source::hdf5_file);
    EXPECT_EQ(f.config.queries.split, Split::test);
}

TEST(SweepConfigFile, ErrorsNameTheLine) {
    const char* bad[] = {
        "sizes = 10\nbogus = 1\ndim = 2\n",
        "sizes = 10\ndim = 2\nmode = fast\n",
        "sizes = 10,,20\ndim = 2\n",
        "sizes = 1.5\ndim = 2\n",
        "sizes = 10\ndim 2\n",
        "dim = 2\n",
        "sizes = 10\n",
        "sizes = 10\ndataset = raw\n",
        "sizes = 10\ndim = 2\nquery_source = external\n",
    };
    for (const char* text : bad) {
        std::istringstream in(text);
        EXPECT_THROW(parse_sweep_config(in), ArgumentError) << text;
    }
    std::istringstream in("sizes = 10\nbogus = 1\n");
    try {
        parse_sweep_config(in);
        FAIL();
    } catch (const ArgumentError& e) {
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
    }
    EXPECT_THROW(load_sweep_config("/nonexistent/sweep.cfg"), IoError);
}
