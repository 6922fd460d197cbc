#include "gbc/regression_tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <utility>

namespace gbc {

namespace {

struct Moments {
  double sum = 0.0;
  double sum_sq = 0.0;
  std::size_t count = 0;

  void add(double r) {
    sum += r;
    sum_sq += r * r;
    ++count;
  }

  // Sum of squared deviations from the mean.
  double sse() const {
    if (count == 0) return 0.0;
    return std::max(0.0, sum_sq - sum * sum / static_cast<double>(count));
  }
};

// Midpoint that still separates a < b under "x <= threshold goes left".
double separating_midpoint(double a, double b) {
  const double mid = a + 0.5 * (b - a);
  return mid < b ? mid : a;
}

struct Builder {
  const FeatureMatrix& features;
  std::span<const double> residuals;
  const TreeParams& params;
  std::vector<RegressionTree::Node> nodes;

  int grow(std::vector<std::size_t> instances, int depth) {
    const int index = static_cast<int>(nodes.size());
    nodes.emplace_back();

    const auto min_leaf = static_cast<std::size_t>(params.min_leaf);
    if (depth >= params.max_depth || instances.size() < 2 * min_leaf) {
      return index;
    }
    const auto split = best_split(features, residuals, instances, params.min_leaf);
    if (!split) {
      return index;
    }

    std::vector<std::size_t> left;
    std::vector<std::size_t> right;
    for (const auto i : instances) {
      (features.at(i, split->feature_index) <= split->threshold ? left : right).push_back(i);
    }
    instances.clear();
    instances.shrink_to_fit();

    const int l = grow(std::move(left), depth + 1);
    const int r = grow(std::move(right), depth + 1);
    auto& node = nodes[static_cast<std::size_t>(index)];
    node.feature = split->feature_index;
    node.threshold = split->threshold;
    node.left = l;
    node.right = r;
    return index;
  }
};

}  // namespace

RegressionTree::RegressionTree() : RegressionTree(std::vector<Node>(1)) {}

RegressionTree::RegressionTree(std::vector<Node> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.empty()) {
    throw std::invalid_argument("RegressionTree: no nodes");
  }
  // Children must point forward, and every non-root node must have exactly
  // one parent; together these rule out cycles and orphans.
  std::vector<int> parents(nodes_.size(), 0);
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& n = nodes_[i];
    if (n.is_leaf()) {
      if (n.right >= 0) {
        throw std::invalid_argument("RegressionTree: node with only one child");
      }
      continue;
    }
    for (const int child : {n.left, n.right}) {
      if (child <= static_cast<int>(i) || child >= static_cast<int>(nodes_.size())) {
        throw std::invalid_argument("RegressionTree: child index out of order");
      }
      ++parents[static_cast<std::size_t>(child)];
    }
    if (!std::isfinite(n.threshold)) {
      throw std::invalid_argument("RegressionTree: non-finite threshold");
    }
  }
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    if (parents[i] != 1) {
      throw std::invalid_argument("RegressionTree: node reachable zero or several times");
    }
  }

  // Number leaves left to right.
  std::vector<std::size_t> stack{0};
  while (!stack.empty()) {
    const auto i = stack.back();
    stack.pop_back();
    auto& n = nodes_[i];
    if (n.is_leaf()) {
      leaf_nodes_.push_back(i);
      n.leaf_id = static_cast<int>(leaf_nodes_.size());
    } else {
      n.leaf_id = 0;
      stack.push_back(static_cast<std::size_t>(n.right));
      stack.push_back(static_cast<std::size_t>(n.left));
    }
  }
}

RegressionTree::Hit RegressionTree::apply(std::span<const double> x) const {
  std::size_t i = 0;
  while (!nodes_[i].is_leaf()) {
    const auto& n = nodes_[i];
    i = static_cast<std::size_t>(x[n.feature] <= n.threshold ? n.left : n.right);
  }
  return {nodes_[i].leaf_id, nodes_[i].gamma};
}

int RegressionTree::depth() const {
  std::vector<int> depths(nodes_.size(), 0);
  int deepest = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& n = nodes_[i];
    if (n.is_leaf()) {
      deepest = std::max(deepest, depths[i]);
    } else {
      depths[static_cast<std::size_t>(n.left)] = depths[i] + 1;
      depths[static_cast<std::size_t>(n.right)] = depths[i] + 1;
    }
  }
  return deepest;
}

std::size_t RegressionTree::leaf_node(int leaf_id) const {
  if (leaf_id < 1 || static_cast<std::size_t>(leaf_id) > leaf_nodes_.size()) {
    throw std::out_of_range("RegressionTree: no leaf " + std::to_string(leaf_id));
  }
  return leaf_nodes_[static_cast<std::size_t>(leaf_id - 1)];
}

double RegressionTree::leaf_value(int leaf_id) const { return nodes_[leaf_node(leaf_id)].gamma; }

void RegressionTree::set_leaf_value(int leaf_id, double gamma) {
  nodes_[leaf_node(leaf_id)].gamma = gamma;
}

std::optional<SplitCandidate> best_split(const FeatureMatrix& features,
                                         std::span<const double> residuals,
                                         std::span<const std::size_t> instances, int min_leaf) {
  if (instances.size() < 2) {
    return std::nullopt;
  }
  const auto min_child = static_cast<std::size_t>(std::max(min_leaf, 1));

  Moments total;
  for (const auto i : instances) {
    total.add(residuals[i]);
  }
  const double parent_sse = total.sse();
  // Differences below this are rounding noise in the moment formula.
  const double noise = 1e-12 * (1.0 + total.sum_sq);

  std::optional<SplitCandidate> best;
  std::vector<std::size_t> order(instances.begin(), instances.end());
  for (std::size_t f = 0; f < features.cols(); ++f) {
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const double va = features.at(a, f);
      const double vb = features.at(b, f);
      return va < vb || (va == vb && a < b);
    });

    Moments left;
    for (std::size_t k = 0; k + 1 < order.size(); ++k) {
      left.add(residuals[order[k]]);
      const double here = features.at(order[k], f);
      const double next = features.at(order[k + 1], f);
      if (here == next) {
        continue;
      }
      const std::size_t n_left = k + 1;
      const std::size_t n_right = order.size() - n_left;
      if (n_left < min_child || n_right < min_child) {
        continue;
      }
      Moments right{total.sum - left.sum, total.sum_sq - left.sum_sq, n_right};
      const double sse = left.sse() + right.sse();
      if (sse >= parent_sse - noise) {
        continue;
      }
      // Features and thresholds are visited in ascending order, so only a
      // strictly better candidate may displace the incumbent.
      if (!best || sse < best->sse_after - noise) {
        best = SplitCandidate{f, separating_midpoint(here, next), sse};
      }
    }
  }
  return best;
}

RegressionTree fit_tree(const FeatureMatrix& features, std::span<const double> residuals,
                        std::span<const std::size_t> instances, const TreeParams& params) {
  if (params.max_depth < 1 || params.min_leaf < 1) {
    throw std::invalid_argument("fit_tree: max_depth and min_leaf must be at least 1");
  }
  Builder builder{features, residuals, params, {}};
  builder.grow(std::vector<std::size_t>(instances.begin(), instances.end()), 0);
  return RegressionTree(std::move(builder.nodes));
}

RegressionTree forced_stump(const FeatureMatrix& features, const ForcedSplit& split) {
  if (split.feature_index >= features.cols()) {
    throw std::invalid_argument("forced split: feature index " +
                                std::to_string(split.feature_index) + " out of range");
  }
  if (!std::isfinite(split.threshold)) {
    throw std::invalid_argument("forced split: threshold must be finite");
  }
  std::vector<RegressionTree::Node> nodes(3);
  nodes[0].feature = split.feature_index;
  nodes[0].threshold = split.threshold;
  nodes[0].left = 1;
  nodes[0].right = 2;
  return RegressionTree(std::move(nodes));
}

LeafAssignment leaf_assignment(const RegressionTree& tree, const FeatureMatrix& features,
                               std::span<const std::size_t> instances) {
  LeafAssignment membership;
  for (int j = 1; j <= static_cast<int>(tree.num_leaves()); ++j) {
    membership[j];
  }
  for (const auto i : instances) {
    membership[tree.apply(features.row(i)).leaf_id].push_back(i);
  }
  for (auto& [leaf, members] : membership) {
    std::sort(members.begin(), members.end());
  }
  return membership;
}

}  // namespace gbc
