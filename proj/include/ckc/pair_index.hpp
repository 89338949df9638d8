#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

#include "ckc/core.hpp"

namespace ckc {

/// Kd-tree over a dataset answering "smallest pairwise distance strictly
/// above x". Lets the solver step through the candidate radii in order
/// without materializing all n^2/2 of them.
class PairDistanceIndex {
 public:
  explicit PairDistanceIndex(const Dataset& data, std::size_t leaf_size = 16)
      : data_(&data), leaf_size_(std::max<std::size_t>(leaf_size, 1)) {
    order_.resize(data.size());
    std::iota(order_.begin(), order_.end(), PointId{0});
    if (!order_.empty()) build(0, order_.size());
  }

  /// min { d(p, q) : p != q, d(p, q) > x }, or nullopt when no pair exceeds x.
  /// Distances come from Dataset::distance, so the result is bit-identical to
  /// the matching entry of candidate_radii().
  std::optional<double> next_above(double x) const {
    double best = std::numeric_limits<double>::infinity();
    for (PointId p : order_) search(0, p, x, best);
    if (std::isinf(best)) return std::nullopt;
    return best;
  }

  /// A value no smaller than the largest pairwise distance.
  double diameter_upper_bound() const {
    if (nodes_.empty()) return 0.0;
    const Node& root = nodes_.front();
    double sum = 0.0;
    for (std::size_t d = 0; d < data_->dim(); ++d) {
      const double w = root.hi[d] - root.lo[d];
      sum += w * w;
    }
    return std::sqrt(sum) * (1.0 + 1e-9);
  }

 private:
  struct Node {
    std::vector<double> lo, hi;
    std::size_t begin = 0, end = 0;
    std::size_t left = 0, right = 0;  // 0 means leaf; the root is never a child
  };

  // Bounding-box bounds are inflated/deflated by this relative slack so a
  // rounding difference against the exact pair distance never prunes a
  // qualifying pair.
  static constexpr double kSlack = 1e-12;

  std::size_t build(std::size_t begin, std::size_t end) {
    const std::size_t dim = data_->dim();
    const std::size_t id = nodes_.size();
    nodes_.push_back(Node{});
    Node node;
    node.begin = begin;
    node.end = end;
    node.lo.assign(dim, std::numeric_limits<double>::infinity());
    node.hi.assign(dim, -std::numeric_limits<double>::infinity());
    for (std::size_t i = begin; i < end; ++i) {
      auto c = data_->coords(order_[i]);
      for (std::size_t d = 0; d < dim; ++d) {
        node.lo[d] = std::min(node.lo[d], c[d]);
        node.hi[d] = std::max(node.hi[d], c[d]);
      }
    }
    if (end - begin > leaf_size_) {
      std::size_t axis = 0;
      for (std::size_t d = 1; d < dim; ++d) {
        if (node.hi[d] - node.lo[d] > node.hi[axis] - node.lo[axis]) axis = d;
      }
      if (node.hi[axis] > node.lo[axis]) {
        const std::size_t mid = begin + (end - begin) / 2;
        std::nth_element(order_.begin() + static_cast<std::ptrdiff_t>(begin),
                         order_.begin() + static_cast<std::ptrdiff_t>(mid),
                         order_.begin() + static_cast<std::ptrdiff_t>(end),
                         [&](PointId a, PointId b) {
                           const double ca = data_->coords(a)[axis];
                           const double cb = data_->coords(b)[axis];
                           return ca < cb || (ca == cb && a < b);
                         });
        node.left = build(begin, mid);
        node.right = build(mid, end);
      }
    }
    nodes_[id] = std::move(node);
    return id;
  }

  void bounds(const Node& node, std::span<const double> q, double& lower, double& upper) const {
    double lo_sum = 0.0, hi_sum = 0.0;
    for (std::size_t d = 0; d < q.size(); ++d) {
      const double below = node.lo[d] - q[d];
      const double above = q[d] - node.hi[d];
      const double gap = std::max({below, above, 0.0});
      lo_sum += gap * gap;
      const double far = std::max(std::abs(q[d] - node.lo[d]), std::abs(q[d] - node.hi[d]));
      hi_sum += far * far;
    }
    lower = std::sqrt(lo_sum) * (1.0 - kSlack);
    upper = std::sqrt(hi_sum) * (1.0 + kSlack);
  }

  void search(std::size_t id, PointId p, double x, double& best) const {
    const Node& node = nodes_[id];
    const auto q = data_->coords(p);
    double lower = 0.0, upper = 0.0;
    bounds(node, q, lower, upper);
    if (lower > best || upper <= x) return;
    if (node.left == 0) {
      for (std::size_t i = node.begin; i < node.end; ++i) {
        const PointId o = order_[i];
        if (o == p) continue;
        const double d = data_->distance(p, o);
        if (d > x && d < best) best = d;
      }
      return;
    }
    double l_lower = 0.0, l_upper = 0.0, r_lower = 0.0, r_upper = 0.0;
    bounds(nodes_[node.left], q, l_lower, l_upper);
    bounds(nodes_[node.right], q, r_lower, r_upper);
    if (l_lower <= r_lower) {
      search(node.left, p, x, best);
      search(node.right, p, x, best);
    } else {
      search(node.right, p, x, best);
      search(node.left, p, x, best);
    }
  }

  const Dataset* data_;
  std::size_t leaf_size_;
  std::vector<PointId> order_;
  std::vector<Node> nodes_;
};

}  // namespace ckc
