#include "fern/bench.hpp"
#include "fern/error.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>

namespace fern {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

class LineError {
public:
    explicit LineError(std::size_t line) : line_(line) {}

    [[noreturn]] void fail(const std::string& what) const {
        throw ArgumentError("sweep config line " + std::to_string(line_) + ": " + what);
    }

private:
    std::size_t line_;
};

double parse_double(const std::string& text, const LineError& where) {
    double value = 0.0;
    const char* last = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), last, value);
    if (ec != std::errc() || ptr != last || text.empty() || !std::isfinite(value)) {
        where.fail("'" + text + "' is not a number");
    }
    return value;
}

/// Accepts plain integers and exact scientific forms such as 1e6 or 5e4.
std::uint64_t parse_count(const std::string& text, const LineError& where) {
    std::uint64_t value = 0;
    const char* last = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), last, value);
    if (ec == std::errc() && ptr == last && !text.empty()) {
        return value;
    }
    const double d = parse_double(text, where);
    if (d < 0.0 || d != std::floor(d) || d > 1e18) {
        where.fail("'" + text + "' is not a nonnegative integer");
    }
    return static_cast<std::uint64_t>(d);
}

std::vector<std::size_t> parse_sizes(const std::string& text, const LineError& where) {
    std::vector<std::size_t> sizes;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        const std::string item = trim(text.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
        if (item.empty()) {
            where.fail("empty entry in size list");
        }
        sizes.push_back(static_cast<std::size_t>(parse_count(item, where)));
        if (comma == std::string::npos) {
            break;
        }
        start = comma + 1;
    }
    return sizes;
}

std::string resolve(const std::string& path, const std::string& base_dir) {
    if (path.empty() || base_dir.empty() || std::filesystem::path(path).is_absolute()) {
        return path;
    }
    return (std::filesystem::path(base_dir) / path).string();
}

} // namespace

SweepFile parse_sweep_config(std::istream& in, const std::string& base_dir) {
    SweepFile file;
    SweepConfig& c = file.config;
    c.queries.split = Split::test;
    c.dataset.seed = c.seed;
    bool have_query_path = false;
    std::string line;
    std::size_t line_no = 0;

    while (std::getline(in, line)) {
        ++line_no;
        const LineError where(line_no);
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            where.fail("expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));

        try {
            if (key == "dataset") {
                c.dataset.source = parse_source(value);
            } else if (key == "path") {
                c.dataset.path = resolve(value, base_dir);
            } else if (key == "split") {
                c.dataset.split = parse_split(value);
            } else if (key == "n") {
                c.dataset.n = parse_count(value, where);
            } else if (key == "dim") {
                c.dataset.dim = parse_count(value, where);
            } else if (key == "seed") {
                c.seed = parse_count(value, where);
                c.dataset.seed = c.seed;
            } else if (key == "sizes") {
                c.sizes = parse_sizes(value, where);
            } else if (key == "queries") {
                c.queries_per_size = parse_count(value, where);
            } else if (key == "query_source") {
                c.query_source = parse_query_source(value);
            } else if (key == "query_path") {
                c.queries.path = resolve(value, base_dir);
                c.queries.source = source_for_path(c.queries.path);
                have_query_path = true;
            } else if (key == "query_split") {
                c.queries.split = parse_split(value);
            } else if (key == "mode") {
                c.mode = parse_sweep_mode(value);
            } else if (key == "epsilon") {
                c.epsilon = parse_double(value, where);
            } else if (key == "traversal") {
                c.traversal = parse_traversal(value);
            } else if (key == "threads") {
                c.threads = parse_count(value, where);
            } else if (key == "label") {
                c.label = value;
            } else if (key == "oracle_full_limit") {
                c.oracle_full_limit = parse_count(value, where);
            } else if (key == "oracle_sample") {
                c.oracle_sample = parse_count(value, where);
            } else if (key == "csv") {
                file.csv_path = resolve(value, base_dir);
            } else if (key == "json") {
                file.json_path = resolve(value, base_dir);
            } else if (key == "svg") {
                file.svg_path = resolve(value, base_dir);
            } else {
                where.fail("unknown key '" + key + "'");
            }
        } catch (const ArgumentError& e) {
            const std::string what = e.what();
            if (what.rfind("sweep config line", 0) == 0) {
                throw;
            }
            where.fail(what);
        }
    }

    if (c.sizes.empty()) {
        throw ArgumentError("sweep config: 'sizes' is required");
    }
    if (c.dataset.source == DatasetSpec::Source::uniform_synthetic && c.dataset.dim == 0) {
        throw ArgumentError("sweep config: uniform dataset needs 'dim'");
    }
    if (c.dataset.source != DatasetSpec::Source::uniform_synthetic && c.dataset.path.empty()) {
        throw ArgumentError("sweep config: file dataset needs 'path'");
    }
    if (c.query_source == QuerySource::external_file && !have_query_path) {
        throw ArgumentError("sweep config: external queries need 'query_path'");
    }
    return file;
}

SweepFile load_sweep_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open sweep config '" + path + "'");
    }
    return parse_sweep_config(in, std::filesystem::path(path).parent_path().string());
}

} // namespace fern
