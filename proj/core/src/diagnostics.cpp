#include "fern/error.hpp"
#include "fern/index.hpp"

#include <cmath>
#include <string>

namespace fern {

namespace {

/// Strict descendants of `id` (the node itself excluded).
template <typename Links, typename Visit>
void for_each_descendant(const Links& links, NodeId id, Visit&& visit) {
    std::vector<NodeId> stack;
    for (NodeId child : {links.left(id), links.right(id)}) {
        if (child != kNoNode) {
            stack.push_back(child);
        }
    }
    while (!stack.empty()) {
        const NodeId cur = stack.back();
        stack.pop_back();
        visit(cur);
        for (NodeId child : {links.left(cur), links.right(cur)}) {
            if (child != kNoNode) {
                stack.push_back(child);
            }
        }
    }
}

} // namespace

DepthStats FernIndex::depth_stats() const {
    if (empty()) {
        throw EmptyIndexError("depth statistics of an empty index");
    }
    DepthStats stats;
    const auto depth = depths();
    double total = 0.0;
    for (NodeId id : preorder()) {
        const std::size_t d = depth[id];
        ++stats.histogram[d];
        stats.max_depth = std::max(stats.max_depth, d);
        total += static_cast<double>(d);
    }
    stats.mean_depth = total / static_cast<double>(size_);
    return stats;
}

InBetweenStats FernIndex::in_between_fraction() const {
    if (empty()) {
        throw EmptyIndexError("in-between statistics of an empty index");
    }
    InBetweenStats stats;
    double sum = 0.0;
    for (NodeId id : preorder()) {
        const Node& n = nodes_[id];
        if (n.left == kNoNode || n.right == kNoNode) {
            continue;
        }
        std::size_t candidates = 0;
        std::size_t in_between = 0;
        const float* lv = vector(n.left).data();
        const float* rv = vector(n.right).data();
        // |margin| < sqrt(support_sq) / 2  <=>  |d_right - d_left| < support_sq
        auto count = [&](NodeId v) {
            const float* x = vector(v).data();
            const double delta = sq_dist_unchecked(x, rv, dim_) - sq_dist_unchecked(x, lv, dim_);
            ++candidates;
            if (std::abs(delta) < n.support_sq) {
                ++in_between;
            }
        };
        for_each_descendant(*this, n.left, count);
        for_each_descendant(*this, n.right, count);
        if (candidates == 0) {
            continue;
        }
        const double fraction = static_cast<double>(in_between) / static_cast<double>(candidates);
        stats.per_node.emplace(id, fraction);
        sum += fraction;
    }
    if (!stats.per_node.empty()) {
        stats.aggregate = sum / static_cast<double>(stats.per_node.size());
    }
    return stats;
}

std::vector<Violation> FernIndex::validate() const {
    std::vector<Violation> out;
    auto report = [&](Violation::Kind kind, NodeId id, std::string detail) {
        out.push_back({kind, id, std::move(detail)});
    };

    if (root_ == kNoNode) {
        if (size_ != 0) {
            report(Violation::Kind::size_mismatch, kNoNode,
                   "no root but size is " + std::to_string(size_));
        }
        return out;
    }
    if (nodes_[root_].parent != kNoNode) {
        report(Violation::Kind::parent_link, root_, "root has a parent");
    }

    // Structure first; the routing check below assumes a tree.
    std::vector<bool> seen(nodes_.size(), false);
    std::vector<NodeId> stack{root_};
    std::size_t reachable = 0;
    bool acyclic = true;
    while (!stack.empty()) {
        const NodeId id = stack.back();
        stack.pop_back();
        if (id >= nodes_.size()) {
            report(Violation::Kind::parent_link, id, "child link points outside the node table");
            acyclic = false;
            continue;
        }
        if (seen[id]) {
            report(Violation::Kind::cycle, id, "node reachable twice");
            acyclic = false;
            continue;
        }
        seen[id] = true;
        ++reachable;

        const Node& n = nodes_[id];
        if (n.right != kNoNode && n.left == kNoNode) {
            report(Violation::Kind::left_fill, id, "right child present without a left child");
        }
        for (NodeId child : {n.left, n.right}) {
            if (child == kNoNode) {
                continue;
            }
            if (child < nodes_.size() && nodes_[child].parent != id) {
                report(Violation::Kind::parent_link, child,
                       "parent link does not point back to node " + std::to_string(id));
            }
            stack.push_back(child);
        }

        const auto v = vector(id);
        if (!all_finite(v)) {
            report(Violation::Kind::non_finite, id, "stored vector has a non-finite component");
        } else if (metric_ == Metric::cosine && std::abs(norm(v) - 1.0) > 1e-6) {
            report(Violation::Kind::norm, id, "stored vector is not unit length");
        }
    }
    if (reachable != size_) {
        report(Violation::Kind::size_mismatch, kNoNode,
               "size is " + std::to_string(size_) + " but " + std::to_string(reachable) + " nodes are reachable");
    }
    if (!acyclic) {
        return out;
    }

    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const Node& n = nodes_[i];
        if (!seen[i] || n.left == kNoNode || n.right == kNoNode) {
            continue;
        }
        const float* lv = vector(n.left).data();
        const float* rv = vector(n.right).data();
        auto check_side = [&](NodeId support, bool expect_left) {
            for_each_descendant(*this, support, [&](NodeId v) {
                const float* x = vector(v).data();
                const bool left = prefers_left(sq_dist_unchecked(x, lv, dim_), sq_dist_unchecked(x, rv, dim_));
                if (left != expect_left) {
                    report(Violation::Kind::routing, v,
                           "lies on the wrong side of the bisector at node " + std::to_string(i));
                }
            });
        };
        check_side(n.left, true);
        check_side(n.right, false);
    }
    return out;
}

} // namespace fern
