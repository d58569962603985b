#include "fern/datasets.hpp"

#include "byte_io.hpp"
#include "fern/error.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>

namespace fern {

std::uint64_t Rng::below(std::uint64_t bound) {
    // Reject the short top range so every residue is equally likely.
    const std::uint64_t threshold = (0 - bound) % bound;
    while (true) {
        const std::uint64_t x = next();
        if (x >= threshold) {
            return x % bound;
        }
    }
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
    // splitmix64 finalizer
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

FlatStore gen_uniform(std::size_t n, std::size_t dim, std::uint64_t seed) {
    if (n == 0 || dim == 0) {
        throw ArgumentError("gen_uniform needs n >= 1 and dim >= 1");
    }
    Rng rng(seed);
    std::vector<float> values(n * dim);
    for (float& x : values) {
        x = rng.uniform_pm1();
    }
    return FlatStore(dim, std::move(values));
}

namespace {

constexpr std::int32_t kMaxFileDim = 100000;

void require_finite(const float* values, std::size_t count, const std::string& path) {
    if (!all_finite(VectorView(values, count))) {
        throw FormatError("'" + path + "' contains a NaN or infinite component");
    }
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path + "'");
    }
    return in;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    return out;
}

void finish(std::ofstream& out, const std::string& path) {
    out.close();
    if (!out) {
        throw IoError("failed writing '" + path + "'");
    }
}

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

} // namespace

FlatStore load_fvecs(const std::string& path) {
    auto in = open_input(path);
    FlatStore store;
    std::vector<float> row;
    std::int32_t dim = 0;
    while (in.peek() != std::char_traits<char>::eof()) {
        const auto record_dim = detail::read_le<std::int32_t>(in, "fvecs record dimension");
        if (record_dim <= 0 || record_dim > kMaxFileDim) {
            throw FormatError("'" + path + "': invalid record dimension " + std::to_string(record_dim));
        }
        if (dim == 0) {
            dim = record_dim;
            row.resize(static_cast<std::size_t>(dim));
            store = FlatStore(static_cast<std::size_t>(dim));
        } else if (record_dim != dim) {
            throw FormatError("'" + path + "': record dimension " + std::to_string(record_dim) +
                              " differs from " + std::to_string(dim));
        }
        detail::read_floats(in, row.data(), row.size(), "fvecs record");
        require_finite(row.data(), row.size(), path);
        store.push_back(row);
    }
    return store;
}

void write_fvecs(const FlatStore& store, const std::string& path) {
    auto out = open_output(path);
    for (std::size_t i = 0; i < store.size(); ++i) {
        detail::write_le<std::int32_t>(out, static_cast<std::int32_t>(store.dim()));
        detail::write_floats(out, store[i].data(), store.dim());
    }
    finish(out, path);
}

std::string raw_stem(const std::string& path) {
    for (const char* ext : {".f32", ".json"}) {
        if (ends_with(path, ext)) {
            return path.substr(0, path.size() - std::char_traits<char>::length(ext));
        }
    }
    return path;
}

FlatStore load_raw(const std::string& path) {
    const std::string stem = raw_stem(path);
    const std::string header_path = stem + ".json";
    const std::string data_path = stem + ".f32";

    nlohmann::json header;
    {
        auto in = open_input(header_path);
        try {
            in >> header;
        } catch (const nlohmann::json::exception& e) {
            throw FormatError("'" + header_path + "': " + e.what());
        }
    }
    std::size_t n = 0;
    std::size_t d = 0;
    try {
        n = header.at("n").get<std::size_t>();
        d = header.at("d").get<std::size_t>();
        const auto dtype = header.value("dtype", std::string("f32le"));
        if (dtype != "f32le") {
            throw FormatError("'" + header_path + "': unsupported dtype '" + dtype + "'");
        }
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("'" + header_path + "': " + e.what());
    }
    if (d == 0 || d > static_cast<std::size_t>(kMaxFileDim)) {
        throw FormatError("'" + header_path + "': invalid dimension " + std::to_string(d));
    }

    std::error_code ec;
    const auto bytes = std::filesystem::file_size(data_path, ec);
    if (ec) {
        throw IoError("cannot stat '" + data_path + "': " + ec.message());
    }
    if (n > bytes / (d * sizeof(float)) || bytes != n * d * sizeof(float)) {
        throw FormatError("'" + data_path + "' holds " + std::to_string(bytes) + " bytes, header implies " +
                          std::to_string(n) + " x " + std::to_string(d) + " floats");
    }

    auto in = open_input(data_path);
    std::vector<float> values(n * d);
    detail::read_floats(in, values.data(), values.size(), "raw matrix");
    require_finite(values.data(), values.size(), data_path);
    return FlatStore(d, std::move(values));
}

void write_raw(const FlatStore& store, const std::string& path) {
    if (store.dim() == 0) {
        throw ArgumentError("cannot write a raw dataset of unknown dimension");
    }
    const std::string stem = raw_stem(path);
    {
        const std::string data_path = stem + ".f32";
        auto out = open_output(data_path);
        detail::write_floats(out, store.values().data(), store.values().size());
        finish(out, data_path);
    }
    {
        const std::string header_path = stem + ".json";
        auto out = open_output(header_path);
        const nlohmann::json header = {{"n", store.size()}, {"d", store.dim()}, {"dtype", "f32le"}};
        out << header.dump() << '\n';
        finish(out, header_path);
    }
}

Split parse_split(const std::string& name) {
    if (name == "train") {
        return Split::train;
    }
    if (name == "test") {
        return Split::test;
    }
    throw ArgumentError("unknown split '" + name + "' (expected train or test)");
}

const char* to_string(Split split) noexcept {
    return split == Split::train ? "train" : "test";
}

DatasetSpec::Source parse_source(const std::string& name) {
    using Source = DatasetSpec::Source;
    if (name == "uniform" || name == "uniform_synthetic") {
        return Source::uniform_synthetic;
    }
    if (name == "fvecs") {
        return Source::fvecs_file;
    }
    if (name == "raw") {
        return Source::raw_file;
    }
    if (name == "hdf5") {
        return Source::hdf5_file;
    }
    throw ArgumentError("unknown dataset source '" + name + "' (expected uniform, fvecs, raw or hdf5)");
}

const char* to_string(DatasetSpec::Source source) noexcept {
    switch (source) {
    case DatasetSpec::Source::uniform_synthetic:
        return "uniform";
    case DatasetSpec::Source::fvecs_file:
        return "fvecs";
    case DatasetSpec::Source::raw_file:
        return "raw";
    case DatasetSpec::Source::hdf5_file:
        return "hdf5";
    }
    return "unknown";
}

DatasetSpec::Source source_for_path(const std::string& path) {
    if (ends_with(path, ".fvecs")) {
        return DatasetSpec::Source::fvecs_file;
    }
    if (ends_with(path, ".hdf5") || ends_with(path, ".h5")) {
        return DatasetSpec::Source::hdf5_file;
    }
    return DatasetSpec::Source::raw_file;
}

FlatStore load_dataset(const DatasetSpec& spec) {
    using Source = DatasetSpec::Source;
    if (spec.source == Source::uniform_synthetic) {
        return gen_uniform(spec.n, spec.dim, spec.seed);
    }
    if (spec.path.empty()) {
        throw ArgumentError(std::string(to_string(spec.source)) + " dataset needs a path");
    }
    FlatStore store;
    switch (spec.source) {
    case Source::fvecs_file:
        store = load_fvecs(spec.path);
        break;
    case Source::raw_file:
        store = load_raw(spec.path);
        break;
    case Source::hdf5_file:
        store = load_hdf5_annbench(spec.path, spec.split);
        break;
    case Source::uniform_synthetic:
        break;
    }
    if (spec.n != 0) {
        if (spec.n > store.size()) {
            throw ArgumentError("requested " + std::to_string(spec.n) + " vectors but '" + spec.path +
                                "' holds " + std::to_string(store.size()));
        }
        if (spec.n < store.size()) {
            store = store.prefix(spec.n);
        }
    }
    return store;
}

} // namespace fern
