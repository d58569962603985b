#include "fern/oracle.hpp"

#include "fern/error.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace fern {

FlatStore::FlatStore(std::size_t dim) : dim_(dim) {
    if (dim == 0) {
        throw DimensionError("store dimension must be at least 1");
    }
}

FlatStore::FlatStore(std::size_t dim, std::vector<float> values) : FlatStore(dim) {
    if (values.size() % dim != 0) {
        throw DimensionError(std::to_string(values.size()) + " values do not split into rows of " +
                             std::to_string(dim));
    }
    values_ = std::move(values);
}

void FlatStore::push_back(VectorView v) {
    if (dim_ == 0 && values_.empty() && !v.empty()) {
        dim_ = v.size();
    }
    if (v.size() != dim_) {
        throw DimensionError("expected dimension " + std::to_string(dim_) + ", got " + std::to_string(v.size()));
    }
    values_.insert(values_.end(), v.begin(), v.end());
}

FlatStore FlatStore::prefix(std::size_t n) const {
    n = std::min(n, size());
    if (dim_ == 0) {
        return {};
    }
    return FlatStore(dim_, std::vector<float>(values_.begin(), values_.begin() + static_cast<std::ptrdiff_t>(n * dim_)));
}

namespace {

void check_query(const FlatStore& store, VectorView q) {
    if (store.empty()) {
        throw EmptyStoreError("query on an empty store");
    }
    if (q.size() != store.dim()) {
        throw DimensionError("expected dimension " + std::to_string(store.dim()) + ", got " +
                             std::to_string(q.size()));
    }
}

} // namespace

Neighbor scan_nn(const FlatStore& store, VectorView q) {
    return scan_nn_prefix(store, store.size(), q);
}

Neighbor scan_nn_prefix(const FlatStore& store, std::size_t rows, VectorView q) {
    check_query(store, q);
    if (rows == 0 || rows > store.size()) {
        throw ArgumentError("prefix of " + std::to_string(rows) + " rows in a store of " + std::to_string(store.size()));
    }
    Neighbor best{0, std::numeric_limits<double>::infinity()};
    const std::size_t n = rows;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = sq_dist_unchecked(q.data(), store[i].data(), q.size());
        if (d < best.sq_distance) {
            best = {i, d};
        }
    }
    return best;
}

std::vector<Neighbor> scan_knn(const FlatStore& store, VectorView q, std::size_t k) {
    check_query(store, q);
    if (k == 0 || k > store.size()) {
        throw ArgumentError("k must be in [1, " + std::to_string(store.size()) + "], got " + std::to_string(k));
    }
    std::vector<Neighbor> all(store.size());
    for (std::size_t i = 0; i < all.size(); ++i) {
        all[i] = {i, sq_dist_unchecked(q.data(), store[i].data(), q.size())};
    }
    auto closer = [](const Neighbor& a, const Neighbor& b) {
        return a.sq_distance < b.sq_distance || (a.sq_distance == b.sq_distance && a.index < b.index);
    };
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end(), closer);
    all.resize(k);
    return all;
}

} // namespace fern
