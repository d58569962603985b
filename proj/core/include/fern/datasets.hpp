#ifndef FERN_DATASETS_HPP
#define FERN_DATASETS_HPP

#include "fern/oracle.hpp"

#include <cstdint>
#include <random>
#include <string>

/**
 * @file datasets.hpp
 *
 * @brief Synthetic workload generation and vector file formats.
 *
 * Formats:
 * - fvecs: repeated records of `[int32 dim][dim x float32]`, little-endian.
 * - raw: `<name>.f32` holding a row-major little-endian float32 matrix, plus a `<name>.json`
 *   sidecar `{"n": <rows>, "d": <cols>, "dtype": "f32le"}`.
 * - HDF5 (optional at build time): ann-benchmarks layout with 2-D float datasets "train" and "test".
 *
 * Every loader rejects NaN and infinite components with a FormatError.
 */

namespace fern {

/**
 * Seeded generator behind every random choice in the library: `std::mt19937_64`, whose output
 * sequence is fixed by the C++ standard. Values are derived from raw 64-bit draws without going
 * through the implementation-defined standard distributions, so streams match across platforms.
 */
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform on [-1, 1) with 24 random mantissa bits; exactly representable as float.
    float uniform_pm1() {
        const auto top24 = static_cast<std::uint32_t>(next() >> 40);
        return static_cast<float>(top24) * (1.0f / 8388608.0f) - 1.0f;
    }

    /// Uniform integer in [0, bound), unbiased. `bound` must be positive.
    std::uint64_t below(std::uint64_t bound);

private:
    std::mt19937_64 engine_;
};

/// Derives an independent seed for a sub-stream, e.g. one per sweep size.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

/**
 * `n` vectors of `dim` components, each drawn i.i.d. uniform on [-1, 1).
 * Identical `(n, dim, seed)` always yields identical bits.
 *
 * @throws ArgumentError if `n` or `dim` is zero.
 */
FlatStore gen_uniform(std::size_t n, std::size_t dim, std::uint64_t seed);

/// @throws FormatError, IoError.
FlatStore load_fvecs(const std::string& path);
/// @throws IoError.
void write_fvecs(const FlatStore& store, const std::string& path);

/**
 * `path` may name the data file, the sidecar, or the common stem: "u128", "u128.f32" and
 * "u128.json" all refer to the same dataset.
 *
 * @throws FormatError, IoError.
 */
FlatStore load_raw(const std::string& path);
/// Writes `<stem>.f32` and `<stem>.json`. @throws IoError.
void write_raw(const FlatStore& store, const std::string& path);

/// Stem of a raw dataset path ("a/b.f32" -> "a/b").
std::string raw_stem(const std::string& path);

enum class Split : std::uint8_t { train, test };

/// @throws ArgumentError for anything but "train" or "test".
Split parse_split(const std::string& name);
const char* to_string(Split split) noexcept;

/// Whether the library was built with HDF5 support.
bool hdf5_supported() noexcept;

/**
 * Reads one split of an ann-benchmarks HDF5 file.
 *
 * @throws FormatError when the dataset is missing, not 2-D, or not floating point.
 * @throws Error when built without HDF5 support.
 */
FlatStore load_hdf5_annbench(const std::string& path, Split split);

/// Writes an ann-benchmarks style file with "train" and "test" datasets. @throws IoError.
void write_hdf5_annbench(const std::string& path, const FlatStore& train, const FlatStore& test);

struct DatasetSpec {
    enum class Source : std::uint8_t { uniform_synthetic, fvecs_file, raw_file, hdf5_file };

    Source source = Source::uniform_synthetic;
    /// Synthetic: number of vectors. Files: 0 loads everything, otherwise the first `n` rows.
    std::size_t n = 0;
    /// Synthetic only; file sources take the dimension from the file.
    std::size_t dim = 0;
    std::uint64_t seed = 0;
    std::string path;
    Split split = Split::train;
};

/// @throws ArgumentError for an unknown name.
DatasetSpec::Source parse_source(const std::string& name);
const char* to_string(DatasetSpec::Source source) noexcept;

/// Guesses the file source from the extension (.fvecs, .hdf5/.h5, anything else is raw).
DatasetSpec::Source source_for_path(const std::string& path);

/// @throws ArgumentError, FormatError, IoError.
FlatStore load_dataset(const DatasetSpec& spec);

} // namespace fern

#endif
