#ifndef FERN_ORACLE_HPP
#define FERN_ORACLE_HPP

#include "fern/geometry.hpp"

#include <cstddef>
#include <vector>

/**
 * @file oracle.hpp
 *
 * @brief Flat vector storage and the brute-force linear scan used as ground truth.
 *
 * The scan shares `sq_dist()` with the index, so an exact index answer and the scan agree bit for bit.
 */

namespace fern {

/// Row-major matrix of `size() x dim()` floats.
class FlatStore {
public:
    /// Empty store of unknown dimension, e.g. what an empty vector file decodes to.
    FlatStore() = default;

    /// @throws DimensionError if `dim` is zero.
    explicit FlatStore(std::size_t dim);

    /// @throws DimensionError if `values.size()` is not a multiple of `dim`.
    FlatStore(std::size_t dim, std::vector<float> values);

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return dim_ == 0 ? 0 : values_.size() / dim_; }
    bool empty() const noexcept { return values_.empty(); }

    VectorView operator[](std::size_t i) const { return {values_.data() + i * dim_, dim_}; }

    /// @throws DimensionError on a size mismatch.
    void push_back(VectorView v);
    void reserve(std::size_t n) { values_.reserve(n * dim_); }

    /// First `n` rows as a new store.
    FlatStore prefix(std::size_t n) const;

    const std::vector<float>& values() const noexcept { return values_; }

    bool operator==(const FlatStore&) const = default;

private:
    std::size_t dim_ = 0;
    std::vector<float> values_;
};

struct Neighbor {
    std::size_t index;
    double sq_distance;

    bool operator==(const Neighbor&) const = default;
};

/**
 * Exact nearest neighbor by linear scan; the first position wins ties.
 *
 * @throws EmptyStoreError, DimensionError.
 */
Neighbor scan_nn(const FlatStore& store, VectorView q);

/// `scan_nn()` restricted to the first `rows` rows. @throws ArgumentError if `rows` exceeds the size.
Neighbor scan_nn_prefix(const FlatStore& store, std::size_t rows, VectorView q);

/**
 * The `k` nearest rows in ascending distance, ties broken by lower position.
 *
 * @throws ArgumentError if `k` is zero or exceeds the store size. DimensionError on mismatch.
 */
std::vector<Neighbor> scan_knn(const FlatStore& store, VectorView q, std::size_t k);

} // namespace fern

#endif
