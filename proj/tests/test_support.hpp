#ifndef FERN_TEST_SUPPORT_HPP
#define FERN_TEST_SUPPORT_HPP

#include "fern/index.hpp"
#include "fern/oracle.hpp"

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

namespace fern {

/// Reaches into the node table so tests can inject structural faults.
struct IndexTestAccess {
    static void set_parent(FernIndex& index, NodeId node, NodeId parent) { index.nodes_[node].parent = parent; }
    static void set_left(FernIndex& index, NodeId node, NodeId child) { index.nodes_[node].left = child; }
    static void set_right(FernIndex& index, NodeId node, NodeId child) { index.nodes_[node].right = child; }
    static void set_size(FernIndex& index, std::size_t size) { index.size_ = size; }
    static float* mutable_vector(FernIndex& index, NodeId node) {
        return index.data_.data() + static_cast<std::size_t>(node) * index.dim_;
    }
};

} // namespace fern

namespace fern::testing {

/// Test-local generator, deliberately independent of the library's Rng.
inline std::vector<Vector> random_vectors(std::size_t n, std::size_t dim, std::uint32_t seed, float lo = -1.0f,
                                          float hi = 1.0f) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<float> dist(lo, hi);
    std::vector<Vector> out(n, Vector(dim));
    for (auto& v : out) {
        for (auto& x : v) {
            x = dist(rng);
        }
    }
    return out;
}

inline FernIndex build_index(const std::vector<Vector>& vectors, Metric metric = Metric::euclidean) {
    FernIndex index(vectors.front().size(), metric);
    for (const auto& v : vectors) {
        index.insert(v);
    }
    return index;
}

inline FernIndex build_index(const FlatStore& store, std::size_t n, Metric metric = Metric::euclidean) {
    FernIndex index(store.dim(), metric);
    index.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        index.insert(store[i]);
    }
    return index;
}

/// Independent reference: plain loop over the components in index order.
inline double reference_sq_dist(const Vector& a, const Vector& b) {
    double total = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double diff = double(a[i]) - double(b[i]);
        total += diff * diff;
    }
    return total;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("fern_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }

    std::string file(const std::string& name) const { return (path_ / name).string(); }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

} // namespace fern::testing

#endif
