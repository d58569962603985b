#ifndef FERN_INDEX_HPP
#define FERN_INDEX_HPP

#include "fern/geometry.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

/**
 * @file index.hpp
 *
 * @brief The FERN tree: a binary tree whose two-child nodes route by the perpendicular bisector
 * of their children's vectors.
 *
 * Every node stores one vector. A new vector fills the first vacant child slot on its descent
 * (left before right); at a node with both children it descends towards whichever child it is
 * closer to. Consequently all vectors below a child lie on that child's side of the bisector,
 * which is what lets a lookup follow a single root-to-node path and lets a nearest-neighbor
 * search prune whole subtrees.
 */

namespace fern {

enum class Metric : std::uint8_t {
    euclidean = 0,
    /// Vectors and queries are normalized to unit length, so Euclidean order equals cosine order.
    cosine = 1,
};

const char* to_string(Metric metric) noexcept;

/// @throws ArgumentError for anything but "euclidean" or "cosine".
Metric parse_metric(const std::string& name);

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

using Payload = std::vector<std::byte>;

/**
 * Decides whether a search also explores the non-preferred child of a two-child node.
 */
struct BoundaryPredicate {
    enum class Mode : std::uint8_t {
        /// Single-path descent; what lookup uses.
        never,
        /// Explore when the query is closer to the bisector than the best distance so far. Exact.
        safe,
        /// Explore when the query is within `epsilon` of the bisector.
        epsilon,
    };

    Mode mode = Mode::safe;
    double epsilon = 0.0;

    static BoundaryPredicate never() { return {Mode::never, 0.0}; }
    static BoundaryPredicate safe() { return {Mode::safe, 0.0}; }
    /// @throws ArgumentError if `eps` is negative or not finite.
    static BoundaryPredicate within(double eps);

    /**
     * @param delta_sq `sq_dist(q, right) - sq_dist(q, left)`.
     * @param support_sq `sq_dist(left, right)`.
     * @param best_sq Smallest squared distance found so far.
     *
     * Compares squared quantities only: `|margin| < r` is `delta_sq^2 < 4 * support_sq * r^2`.
     */
    bool fires(double delta_sq, double support_sq, double best_sq) const noexcept {
        switch (mode) {
        case Mode::never:
            return false;
        case Mode::safe:
            return delta_sq * delta_sq < 4.0 * support_sq * best_sq;
        case Mode::epsilon:
            return delta_sq * delta_sq < 4.0 * support_sq * epsilon * epsilon;
        }
        return false;
    }
};

/// @throws ArgumentError unless `text` is "never", "safe" or "eps:<nonnegative float>".
BoundaryPredicate parse_predicate(const std::string& text);

std::string to_string(const BoundaryPredicate& predicate);

enum class Traversal : std::uint8_t {
    /// Level-order.
    queue,
    /// Depth-first with backtracking.
    stack,
};

/// @throws ArgumentError for anything but "queue" or "stack".
Traversal parse_traversal(const std::string& name);

struct QueryResult {
    Vector vector;
    NodeId node = kNoNode;
    double sq_distance = std::numeric_limits<double>::infinity();
    /// Nodes whose distance to the query was evaluated.
    std::size_t visited = 0;
    std::optional<Payload> payload;
};

struct DepthStats {
    double mean_depth = 0.0;
    std::size_t max_depth = 0;
    /// depth -> number of nodes at that depth.
    std::map<std::size_t, std::size_t> histogram;
};

/**
 * Fraction of stored vectors that sit closer to a bisector than its support vectors do.
 * Only two-child nodes with at least one strict descendant below their children appear in `per_node`.
 */
struct InBetweenStats {
    std::map<NodeId, double> per_node;
    /// Mean of `per_node`, or 0 when it is empty.
    double aggregate = 0.0;
};

struct Violation {
    enum class Kind : std::uint8_t {
        left_fill,
        parent_link,
        size_mismatch,
        routing,
        cycle,
        non_finite,
        norm,
    };

    Kind kind;
    NodeId node = kNoNode;
    std::string detail;
};

const char* to_string(Violation::Kind kind) noexcept;

class FernIndex {
public:
    /// @throws DimensionError if `dim` is zero.
    explicit FernIndex(std::size_t dim, Metric metric = Metric::euclidean);

    std::size_t dim() const noexcept { return dim_; }
    Metric metric() const noexcept { return metric_; }
    std::size_t size() const noexcept { return size_; }
    bool empty() const noexcept { return size_ == 0; }

    /// Preallocates storage for `n` vectors.
    void reserve(std::size_t n);

    /**
     * Inserts `v` at the first vacant slot on its descent path.
     *
     * @return Depth of the new node; the root has depth 0.
     * @throws DimensionError, NonFiniteError, or ZeroVectorError (cosine metric only).
     */
    std::size_t insert(VectorView v, std::optional<Payload> payload = std::nullopt);

    /**
     * Single-path retrieval of a stored vector. Stops as soon as an exact match is evaluated, so a
     * stored vector at depth `k` is found after `k + 1` visits. For a vector that was never
     * inserted, the closest vector on the routing path is returned.
     *
     * @throws EmptyIndexError, DimensionError.
     */
    QueryResult lookup(VectorView q) const;

    /**
     * Nearest-neighbor search. With `BoundaryPredicate::safe()` the result is an exact nearest
     * neighbor over the whole index, whichever traversal is chosen.
     *
     * @throws EmptyIndexError, DimensionError.
     */
    QueryResult search(VectorView q, BoundaryPredicate predicate, Traversal traversal = Traversal::queue) const;

    /// @throws EmptyIndexError.
    DepthStats depth_stats() const;

    /// @throws EmptyIndexError.
    InBetweenStats in_between_fraction() const;

    /// Full structural check. Violations are returned, never thrown.
    std::vector<Violation> validate() const;

    /**
     * Writes the binary index format: "FERN", u32 version, u8 metric, u32 dim, u64 count, then
     * preorder nodes as [u8 flags][dim x f32][optional u32 length + payload bytes]. Little-endian.
     *
     * @throws EmptyIndexError for an empty index, IoError if the stream fails.
     */
    void serialize(std::ostream& out) const;

    /// @throws FormatError on bad magic, unsupported version, truncation or implausible sizes.
    static FernIndex deserialize(std::istream& in);

    void save(const std::string& path) const;
    static FernIndex load(const std::string& path);

    NodeId root() const noexcept { return root_; }
    VectorView vector(NodeId id) const { return {data_.data() + static_cast<std::size_t>(id) * dim_, dim_}; }
    NodeId left(NodeId id) const { return nodes_[id].left; }
    NodeId right(NodeId id) const { return nodes_[id].right; }
    NodeId parent(NodeId id) const { return nodes_[id].parent; }
    const Payload* payload(NodeId id) const;

    /// Node ids in preorder (node, left subtree, right subtree).
    std::vector<NodeId> preorder() const;

    /// Depth of every node, indexed by NodeId.
    std::vector<std::size_t> depths() const;

private:
    friend struct IndexTestAccess;

    struct Node {
        NodeId left = kNoNode;
        NodeId right = kNoNode;
        NodeId parent = kNoNode;
        std::uint32_t payload_slot = kNoNode;
        /// sq_dist(left, right) once both children exist.
        double support_sq = 0.0;
    };

    Vector prepare(VectorView v) const;
    NodeId append_node(VectorView v, NodeId parent, std::optional<Payload> payload);
    void attach_right(NodeId node, NodeId child);
    double dist_to(NodeId id, const float* q) const noexcept {
        return sq_dist_unchecked(q, data_.data() + static_cast<std::size_t>(id) * dim_, dim_);
    }
    QueryResult run_query(VectorView q, BoundaryPredicate predicate, Traversal traversal) const;

    std::size_t dim_;
    Metric metric_;
    std::size_t size_ = 0;
    NodeId root_ = kNoNode;
    std::vector<Node> nodes_;
    std::vector<float> data_;
    std::vector<Payload> payloads_;
};

} // namespace fern

#endif
