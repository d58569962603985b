#include "fern/index.hpp"

#include "fern/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <deque>

namespace fern {

const char* to_string(Metric metric) noexcept {
    switch (metric) {
    case Metric::euclidean:
        return "euclidean";
    case Metric::cosine:
        return "cosine";
    }
    return "unknown";
}

Metric parse_metric(const std::string& name) {
    if (name == "euclidean") {
        return Metric::euclidean;
    }
    if (name == "cosine") {
        return Metric::cosine;
    }
    throw ArgumentError("unknown metric '" + name + "' (expected euclidean or cosine)");
}

BoundaryPredicate BoundaryPredicate::within(double eps) {
    if (!(eps >= 0.0) || !std::isfinite(eps)) {
        throw ArgumentError("epsilon must be a finite nonnegative number");
    }
    return {Mode::epsilon, eps};
}

BoundaryPredicate parse_predicate(const std::string& text) {
    if (text == "never") {
        return BoundaryPredicate::never();
    }
    if (text == "safe") {
        return BoundaryPredicate::safe();
    }
    if (text.rfind("eps:", 0) == 0) {
        const char* first = text.data() + 4;
        const char* last = text.data() + text.size();
        double eps = 0.0;
        auto [ptr, ec] = std::from_chars(first, last, eps);
        if (ec != std::errc() || ptr != last || first == last) {
            throw ArgumentError("bad epsilon in '" + text + "'");
        }
        return BoundaryPredicate::within(eps);
    }
    throw ArgumentError("unknown boundary mode '" + text + "' (expected never, safe or eps:<float>)");
}

std::string to_string(const BoundaryPredicate& predicate) {
    switch (predicate.mode) {
    case BoundaryPredicate::Mode::never:
        return "never";
    case BoundaryPredicate::Mode::safe:
        return "safe";
    case BoundaryPredicate::Mode::epsilon: {
        char buf[64];
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), predicate.epsilon);
        return "eps:" + std::string(buf, ptr);
    }
    }
    return "unknown";
}

Traversal parse_traversal(const std::string& name) {
    if (name == "queue") {
        return Traversal::queue;
    }
    if (name == "stack") {
        return Traversal::stack;
    }
    throw ArgumentError("unknown traversal '" + name + "' (expected queue or stack)");
}

const char* to_string(Violation::Kind kind) noexcept {
    switch (kind) {
    case Violation::Kind::left_fill:
        return "left_fill";
    case Violation::Kind::parent_link:
        return "parent_link";
    case Violation::Kind::size_mismatch:
        return "size_mismatch";
    case Violation::Kind::routing:
        return "routing";
    case Violation::Kind::cycle:
        return "cycle";
    case Violation::Kind::non_finite:
        return "non_finite";
    case Violation::Kind::norm:
        return "norm";
    }
    return "unknown";
}

FernIndex::FernIndex(std::size_t dim, Metric metric) : dim_(dim), metric_(metric) {
    if (dim == 0) {
        throw DimensionError("index dimension must be at least 1");
    }
}

void FernIndex::reserve(std::size_t n) {
    nodes_.reserve(n);
    data_.reserve(n * dim_);
}

const Payload* FernIndex::payload(NodeId id) const {
    const auto slot = nodes_[id].payload_slot;
    return slot == kNoNode ? nullptr : &payloads_[slot];
}

Vector FernIndex::prepare(VectorView v) const {
    if (v.size() != dim_) {
        throw DimensionError("expected dimension " + std::to_string(dim_) + ", got " + std::to_string(v.size()));
    }
    if (!all_finite(v)) {
        throw NonFiniteError("vector has a NaN or infinite component");
    }
    if (metric_ == Metric::cosine) {
        return normalize(v);
    }
    return Vector(v.begin(), v.end());
}

NodeId FernIndex::append_node(VectorView v, NodeId parent, std::optional<Payload> payload) {
    if (nodes_.size() >= static_cast<std::size_t>(kNoNode)) {
        throw ArgumentError("index is full");
    }
    const auto id = static_cast<NodeId>(nodes_.size());
    Node node;
    node.parent = parent;
    if (payload) {
        node.payload_slot = static_cast<std::uint32_t>(payloads_.size());
        payloads_.push_back(std::move(*payload));
    }
    nodes_.push_back(node);
    data_.insert(data_.end(), v.begin(), v.end());
    ++size_;
    return id;
}

void FernIndex::attach_right(NodeId node, NodeId child) {
    auto& n = nodes_[node];
    n.right = child;
    if (n.left != kNoNode) {
        n.support_sq = sq_dist_unchecked(vector(n.left).data(), vector(child).data(), dim_);
    }
}

std::size_t FernIndex::insert(VectorView v, std::optional<Payload> payload) {
    const Vector stored = prepare(v);
    if (root_ == kNoNode) {
        root_ = append_node(stored, kNoNode, std::move(payload));
        return 0;
    }

    NodeId current = root_;
    std::size_t depth = 0;
    while (true) {
        const Node& n = nodes_[current];
        if (n.left == kNoNode) {
            const NodeId child = append_node(stored, current, std::move(payload));
            nodes_[current].left = child;
            return depth + 1;
        }
        if (n.right == kNoNode) {
            const NodeId child = append_node(stored, current, std::move(payload));
            attach_right(current, child);
            return depth + 1;
        }
        const double to_left = dist_to(n.left, stored.data());
        const double to_right = dist_to(n.right, stored.data());
        current = prefers_left(to_left, to_right) ? n.left : n.right;
        ++depth;
    }
}

QueryResult FernIndex::lookup(VectorView q) const {
    return run_query(q, BoundaryPredicate::never(), Traversal::queue);
}

QueryResult FernIndex::search(VectorView q, BoundaryPredicate predicate, Traversal traversal) const {
    return run_query(q, predicate, traversal);
}

namespace {

struct Pending {
    NodeId id;
    /// Distance to the query when the parent already computed it, NaN otherwise.
    double sq;
    /// For a non-preferred child: the bisector test is repeated when it is popped.
    bool guarded;
    double delta_sq;
    double support_sq;
};

constexpr double kUnknown = std::numeric_limits<double>::quiet_NaN();

} // namespace

QueryResult FernIndex::run_query(VectorView raw_query, BoundaryPredicate predicate, Traversal traversal) const {
    if (empty()) {
        throw EmptyIndexError("query on an empty index");
    }
    const Vector q = prepare(raw_query);

    double best = std::numeric_limits<double>::infinity();
    NodeId best_id = kNoNode;
    std::size_t visited = 0;

    std::deque<Pending> pending;
    pending.push_back({root_, kUnknown, false, 0.0, 0.0});

    while (!pending.empty()) {
        Pending entry;
        if (traversal == Traversal::queue) {
            entry = pending.front();
            pending.pop_front();
        } else {
            entry = pending.back();
            pending.pop_back();
        }

        // The best distance may have shrunk since this sibling was scheduled.
        if (entry.guarded && !predicate.fires(entry.delta_sq, entry.support_sq, best)) {
            continue;
        }

        const double d = std::isnan(entry.sq) ? dist_to(entry.id, q.data()) : entry.sq;
        ++visited;
        if (d < best) {
            best = d;
            best_id = entry.id;
        }
        if (best == 0.0) {
            break;
        }

        const Node& n = nodes_[entry.id];
        if (n.left != kNoNode && n.right != kNoNode) {
            const double to_left = dist_to(n.left, q.data());
            const double to_right = dist_to(n.right, q.data());
            const double delta = to_right - to_left;
            const bool go_left = prefers_left(to_left, to_right);

            const Pending preferred{go_left ? n.left : n.right, go_left ? to_left : to_right, false, 0.0, 0.0};
            const Pending other{go_left ? n.right : n.left, go_left ? to_right : to_left, true, delta, n.support_sq};
            // The preferred child is always visited, so its distance already bounds the answer.
            const bool explore_other = predicate.fires(delta, n.support_sq, std::min(best, preferred.sq));

            if (traversal == Traversal::queue) {
                pending.push_back(preferred);
                if (explore_other) {
                    pending.push_back(other);
                }
            } else {
                if (explore_other) {
                    pending.push_back(other);
                }
                pending.push_back(preferred);
            }
        } else if (n.left != kNoNode) {
            pending.push_back({n.left, kUnknown, false, 0.0, 0.0});
        } else if (n.right != kNoNode) {
            pending.push_back({n.right, kUnknown, false, 0.0, 0.0});
        }
    }

    QueryResult result;
    result.node = best_id;
    const auto v = vector(best_id);
    result.vector.assign(v.begin(), v.end());
    result.sq_distance = best;
    result.visited = visited;
    if (const Payload* p = payload(best_id)) {
        result.payload = *p;
    }
    return result;
}

std::vector<NodeId> FernIndex::preorder() const {
    std::vector<NodeId> order;
    if (root_ == kNoNode) {
        return order;
    }
    order.reserve(size_);
    std::vector<NodeId> stack{root_};
    std::vector<bool> seen(nodes_.size(), false);
    while (!stack.empty()) {
        const NodeId id = stack.back();
        stack.pop_back();
        if (seen[id]) {
            continue;
        }
        seen[id] = true;
        order.push_back(id);
        if (nodes_[id].right != kNoNode) {
            stack.push_back(nodes_[id].right);
        }
        if (nodes_[id].left != kNoNode) {
            stack.push_back(nodes_[id].left);
        }
    }
    return order;
}

std::vector<std::size_t> FernIndex::depths() const {
    std::vector<std::size_t> depth(nodes_.size(), 0);
    if (root_ == kNoNode) {
        return depth;
    }
    std::vector<bool> seen(nodes_.size(), false);
    std::vector<std::pair<NodeId, std::size_t>> stack{{root_, 0}};
    while (!stack.empty()) {
        const auto [id, d] = stack.back();
        stack.pop_back();
        if (seen[id]) {
            continue;
        }
        seen[id] = true;
        depth[id] = d;
        for (NodeId child : {nodes_[id].left, nodes_[id].right}) {
            if (child != kNoNode) {
                stack.emplace_back(child, d + 1);
            }
        }
    }
    return depth;
}

} // namespace fern
