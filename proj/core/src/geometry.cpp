#include "fern/geometry.hpp"

#include "fern/error.hpp"

#include <cmath>
#include <string>

namespace fern {

namespace {

void require_same_dim(std::size_t a, std::size_t b) {
    if (a != b) {
        throw DimensionError("dimension mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
    }
}

} // namespace

double sq_dist(VectorView a, VectorView b) {
    require_same_dim(a.size(), b.size());
    return sq_dist_unchecked(a.data(), b.data(), a.size());
}

double margin(VectorView q, VectorView left, VectorView right) {
    require_same_dim(q.size(), left.size());
    require_same_dim(q.size(), right.size());
    const double support_sq = sq_dist_unchecked(left.data(), right.data(), q.size());
    if (support_sq == 0.0) {
        throw DegenerateHyperplane("left and right support vectors coincide");
    }
    const double to_left = sq_dist_unchecked(q.data(), left.data(), q.size());
    const double to_right = sq_dist_unchecked(q.data(), right.data(), q.size());
    return (to_right - to_left) / (2.0 * std::sqrt(support_sq));
}

bool prefers_left(VectorView q, VectorView left, VectorView right) {
    require_same_dim(q.size(), left.size());
    require_same_dim(q.size(), right.size());
    return prefers_left(sq_dist_unchecked(q.data(), left.data(), q.size()),
                        sq_dist_unchecked(q.data(), right.data(), q.size()));
}

double norm(VectorView v) {
    double sum = 0.0;
    for (float x : v) {
        sum += static_cast<double>(x) * static_cast<double>(x);
    }
    return std::sqrt(sum);
}

Vector normalize(VectorView v) {
    const double n = norm(v);
    if (n == 0.0) {
        throw ZeroVectorError("cannot normalize a zero vector");
    }
    Vector out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        out[i] = static_cast<float>(static_cast<double>(v[i]) / n);
    }
    return out;
}

bool all_finite(VectorView v) noexcept {
    for (float x : v) {
        if (!std::isfinite(x)) {
            return false;
        }
    }
    return true;
}

} // namespace fern
