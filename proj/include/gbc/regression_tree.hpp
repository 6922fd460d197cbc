#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "gbc/dataset.hpp"

namespace gbc {

struct SplitCandidate {
  std::size_t feature_index = 0;
  double threshold = 0.0;
  double sse_after = 0.0;
};

struct TreeParams {
  int max_depth = 1;
  int min_leaf = 1;
};

// An explicit split for a depth-one tree, bypassing the greedy search.
struct ForcedSplit {
  std::size_t feature_index = 0;
  double threshold = 0.0;

  friend bool operator==(const ForcedSplit&, const ForcedSplit&) = default;
};

// Array-backed binary tree. Node 0 is the root. An internal node sends x left
// iff x[feature] <= threshold. Leaves are numbered 1..J from left to right.
class RegressionTree {
 public:
  struct Node {
    std::size_t feature = 0;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    int leaf_id = 0;
    double gamma = 0.0;

    bool is_leaf() const { return left < 0; }
    friend bool operator==(const Node&, const Node&) = default;
  };

  struct Hit {
    int leaf_id;
    double gamma;
  };

  // Single-leaf tree.
  RegressionTree();
  // Takes ownership of a node array; validates structure and renumbers
  // leaves left to right. Throws std::invalid_argument when malformed.
  explicit RegressionTree(std::vector<Node> nodes);

  Hit apply(std::span<const double> x) const;

  std::size_t num_leaves() const { return leaf_nodes_.size(); }
  int depth() const;
  const std::vector<Node>& nodes() const { return nodes_; }

  double leaf_value(int leaf_id) const;
  void set_leaf_value(int leaf_id, double gamma);

  friend bool operator==(const RegressionTree& a, const RegressionTree& b) {
    return a.nodes_ == b.nodes_;
  }

 private:
  std::size_t leaf_node(int leaf_id) const;

  std::vector<Node> nodes_;
  std::vector<std::size_t> leaf_nodes_;  // leaf_id - 1 -> node index
};

// Leaf id -> member instance indices (0-based), ascending.
using LeafAssignment = std::map<int, std::vector<std::size_t>>;

// Minimum-SSE split over every feature and every midpoint between adjacent
// distinct values. Children smaller than min_leaf are not considered.
// Returns nullopt when no split strictly lowers the node's SSE.
// Ties go to the lowest feature index, then the lowest threshold.
std::optional<SplitCandidate> best_split(const FeatureMatrix& features,
                                         std::span<const double> residuals,
                                         std::span<const std::size_t> instances,
                                         int min_leaf = 1);

// Greedy recursive fit. Leaf values start at 0.
RegressionTree fit_tree(const FeatureMatrix& features, std::span<const double> residuals,
                        std::span<const std::size_t> instances, const TreeParams& params);

// Depth-one tree with the given split. Throws std::invalid_argument for an
// out-of-range feature or a non-finite threshold.
RegressionTree forced_stump(const FeatureMatrix& features, const ForcedSplit& split);

LeafAssignment leaf_assignment(const RegressionTree& tree, const FeatureMatrix& features,
                               std::span<const std::size_t> instances);

}  // namespace gbc
