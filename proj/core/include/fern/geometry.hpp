#ifndef FERN_GEOMETRY_HPP
#define FERN_GEOMETRY_HPP

#include <span>
#include <vector>

/**
 * @file geometry.hpp
 *
 * @brief Distance and bisector-margin primitives shared by the index, the oracle and the diagnostics.
 *
 * Vectors are 32-bit floats; every distance is accumulated in double precision, left to right,
 * so two callers that compute `sq_dist` on the same pair always get bit-identical results.
 */

namespace fern {

/// Non-owning view over the components of one vector.
using VectorView = std::span<const float>;

/// Owning vector.
using Vector = std::vector<float>;

/**
 * @return Squared Euclidean distance between `a` and `b`, summed in index order in double precision.
 * @throws DimensionError if the sizes differ.
 */
double sq_dist(VectorView a, VectorView b);

/// Unchecked variant of `sq_dist()` for callers that already validated both dimensions.
inline double sq_dist_unchecked(const float* a, const float* b, std::size_t dim) noexcept {
    double sum = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
        const double diff = static_cast<double>(a[i]) - static_cast<double>(b[i]);
        sum += diff * diff;
    }
    return sum;
}

/**
 * Signed Euclidean distance from `q` to the perpendicular bisector of `left` and `right`.
 * Positive when `q` is strictly closer to `left`.
 *
 * @throws DegenerateHyperplane if `left` and `right` are the same point.
 * @throws DimensionError on mismatched sizes.
 */
double margin(VectorView q, VectorView left, VectorView right);

/**
 * The routing comparator used by insertion, lookup and search alike.
 * Ties (equal squared distances) go left.
 */
bool prefers_left(VectorView q, VectorView left, VectorView right);

/// Decision form of `prefers_left()` when both squared distances are already known.
inline bool prefers_left(double sq_to_left, double sq_to_right) noexcept {
    return sq_to_left <= sq_to_right;
}

/// Euclidean norm, accumulated in double precision.
double norm(VectorView v);

/**
 * @return `v` divided by its Euclidean norm.
 * @throws ZeroVectorError if every component is zero.
 */
Vector normalize(VectorView v);

/// @return true when every component is finite.
bool all_finite(VectorView v) noexcept;

} // namespace fern

#endif
