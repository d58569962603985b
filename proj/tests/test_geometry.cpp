#include "fern/error.hpp"
#include "fern/geometry.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace fern;
using fern::testing::random_vectors;
using fern::testing::reference_sq_dist;

namespace {

/// Signed distance to the bisector via projection onto (left - right); independent of margin().
double projection_margin(const Vector& q, const Vector& l, const Vector& r) {
    double dot = 0.0;
    double len_sq = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        const double mid = (double(l[i]) + double(r[i])) / 2.0;
        const double normal = double(l[i]) - double(r[i]);
        dot += (double(q[i]) - mid) * normal;
        len_sq += normal * normal;
    }
    return dot / std::sqrt(len_sq);
}

} // namespace

TEST(SqDist, IdentityIsZero) {
    EXPECT_EQ(sq_dist(Vector{0, 0}, Vector{0, 0}), 0.0);
}

TEST(SqDist, OppositeUnitVectors) {
    EXPECT_EQ(sq_dist(Vector{1, 0}, Vector{-1, 0}), 4.0);
}

TEST(SqDist, MatchesScalarReferenceBitForBit) {
    const auto v = random_vectors(2, 128, 11);
    EXPECT_EQ(sq_dist(v[0], v[1]), reference_sq_dist(v[0], v[1]));
}

TEST(SqDist, DimensionMismatchThrows) {
    EXPECT_THROW(sq_dist(Vector{1, 2}, Vector{1, 2, 3}), DimensionError);
}

TEST(SqDist, SymmetricAndZeroOnSelf) {
    for (std::size_t d : {1u, 7u, 128u, 784u}) {
        const auto v = random_vectors(20, d, 100 + static_cast<std::uint32_t>(d));
        for (std::size_t i = 0; i + 1 < v.size(); ++i) {
            EXPECT_EQ(sq_dist(v[i], v[i + 1]), sq_dist(v[i + 1], v[i]));
            EXPECT_EQ(sq_dist(v[i], v[i]), 0.0);
        }
    }
}

TEST(Margin, AxisBisector) {
    EXPECT_NEAR(margin(Vector{0.3f, 5.0f}, Vector{1, 0}, Vector{-1, 0}), 0.3, 1e-7);
}

TEST(Margin, ZeroOnHyperplane) {
    EXPECT_EQ(margin(Vector{0.0f, -2.5f}, Vector{1, 0}, Vector{-1, 0}), 0.0);
}

TEST(Margin, DegenerateHyperplaneThrows) {
    EXPECT_THROW(margin(Vector{1, 1}, Vector{2, 3}, Vector{2, 3}), DegenerateHyperplane);
}

TEST(Margin, DimensionMismatchThrows) {
    EXPECT_THROW(margin(Vector{1, 1}, Vector{2, 3, 4}, Vector{2, 3}), DimensionError);
}

TEST(Margin, MatchesProjectionFormula) {
    const auto v = random_vectors(300, 16, 5);
    for (std::size_t i = 0; i + 2 < v.size(); i += 3) {
        const double expected = projection_margin(v[i], v[i + 1], v[i + 2]);
        const double got = margin(v[i], v[i + 1], v[i + 2]);
        EXPECT_NEAR(got, expected, 1e-9 * std::max(1.0, std::abs(expected)));
        EXPECT_NEAR(std::abs(got), std::abs(expected), 1e-9 * std::abs(expected) + 1e-15);
    }
}

TEST(Margin, AntisymmetricUnderSwap) {
    const auto v = random_vectors(300, 32, 6);
    for (std::size_t i = 0; i + 2 < v.size(); i += 3) {
        const double a = margin(v[i], v[i + 1], v[i + 2]);
        const double b = margin(v[i], v[i + 2], v[i + 1]);
        EXPECT_NEAR(a, -b, 1e-12 * std::abs(a));
    }
}

TEST(PrefersLeft, VisiblyNearerLeft) {
    EXPECT_TRUE(prefers_left(Vector{0.9f, 0.1f}, Vector{1, 0}, Vector{-1, 0}));
}

TEST(PrefersLeft, TieRoutesLeft) {
    EXPECT_TRUE(prefers_left(Vector{0.0f, 0.7f}, Vector{1, 0}, Vector{-1, 0}));
    EXPECT_TRUE(prefers_left(Vector{3, 3}, Vector{1, 1}, Vector{1, 1}));
}

TEST(PrefersLeft, DimensionMismatchThrows) {
    EXPECT_THROW(prefers_left(Vector{1}, Vector{1, 0}, Vector{-1, 0}), DimensionError);
}

TEST(PrefersLeft, AgreesWithMarginSign) {
    const auto v = random_vectors(3000, 8, 7);
    for (std::size_t i = 0; i + 2 < v.size(); i += 3) {
        const double m = margin(v[i], v[i + 1], v[i + 2]);
        if (m > 0) {
            EXPECT_TRUE(prefers_left(v[i], v[i + 1], v[i + 2]));
        } else if (m < 0) {
            EXPECT_FALSE(prefers_left(v[i], v[i + 1], v[i + 2]));
        }
    }
}

TEST(Normalize, ThreeFourFive) {
    const auto n = normalize(Vector{3, 4});
    EXPECT_FLOAT_EQ(n[0], 0.6f);
    EXPECT_FLOAT_EQ(n[1], 0.8f);
}

TEST(Normalize, UnitVectorIsFixedPoint) {
    const Vector unit{0, 1, 0};
    const auto n = normalize(unit);
    for (std::size_t i = 0; i < unit.size(); ++i) {
        EXPECT_NEAR(n[i], unit[i], 1e-6);
    }
}

TEST(Normalize, RandomVectorHasUnitNorm) {
    const auto v = random_vectors(50, 128, 8, -100.0f, 100.0f);
    for (const auto& x : v) {
        EXPECT_NEAR(norm(normalize(x)), 1.0, 1e-6);
    }
}

TEST(Normalize, Idempotent) {
    const auto v = random_vectors(50, 64, 9);
    for (const auto& x : v) {
        const auto once = normalize(x);
        const auto twice = normalize(once);
        for (std::size_t i = 0; i < x.size(); ++i) {
            EXPECT_NEAR(twice[i], once[i], 1e-6);
        }
    }
}

TEST(Normalize, ZeroVectorThrows) {
    EXPECT_THROW(normalize(Vector{0, 0, 0}), ZeroVectorError);
}

TEST(AllFinite, DetectsNanAndInfinity) {
    EXPECT_TRUE(all_finite(Vector{1, 2}));
    EXPECT_FALSE(all_finite(Vector{1, std::nanf("")}));
    EXPECT_FALSE(all_finite(Vector{INFINITY, 0}));
}
