#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gbc/dataset.hpp"
#include "gbc/regression_tree.hpp"

namespace gbc {

inline constexpr int kModelFormatVersion = 1;

struct TrainConfig {
  int n_trees = 3;
  double learning_rate = 0.1;
  int max_depth = 1;
  int min_leaf = 1;
  // One split per iteration; requires max_depth == 1.
  std::optional<std::vector<ForcedSplit>> forced_splits;
  double threshold = 0.5;

  // Throws ConfigError describing the first violated constraint.
  void validate() const;
};

// Fitted ensemble. Raw score of x is sum_m learning_rate * T_m(x), starting
// from zero.
struct Model {
  std::vector<RegressionTree> trees;
  double learning_rate = 0.1;
  std::size_t n_features = 0;
  std::vector<std::string> feature_names;
  int format_version = kModelFormatVersion;

  friend bool operator==(const Model&, const Model&) = default;
};

// Per-instance working set: F, p = sigmoid(F), and the residuals the most
// recent tree was fitted to.
struct TrainingState {
  std::vector<double> scores;
  std::vector<double> probs;
  std::vector<double> residuals;

  explicit TrainingState(std::size_t n);
};

struct InstanceRecord {
  double prev_prob = 0.0;
  double residual = 0.0;
  int leaf_id = 0;
  double score = 0.0;  // after the update
  double prob = 0.0;   // after the update

  friend bool operator==(const InstanceRecord&, const InstanceRecord&) = default;
};

struct LeafRecord {
  int leaf_id = 0;
  std::vector<std::size_t> members;  // 0-based instance indices
  double numerator = 0.0;
  double denominator = 0.0;
  double gamma = 0.0;

  friend bool operator==(const LeafRecord&, const LeafRecord&) = default;
};

struct IterationRecord {
  int iteration = 0;  // 1-based
  std::vector<InstanceRecord> instances;
  std::vector<LeafRecord> leaves;
  double total_loss = 0.0;

  friend bool operator==(const IterationRecord&, const IterationRecord&) = default;
};

struct TrainingTrace {
  std::vector<IterationRecord> iterations;

  friend bool operator==(const TrainingTrace&, const TrainingTrace&) = default;
};

struct TrainResult {
  Model model;
  TrainingTrace trace;
};

TrainResult train(const Dataset& dataset, const TrainConfig& config);

// Re-runs the boosting bookkeeping of an already fitted model over labelled
// data. Gammas come from the model; numerators and denominators are
// recomputed from the data. On the training set this reproduces the trace
// emitted by train().
TrainingTrace replay_trace(const Model& model, const Dataset& dataset);

// Throws ConfigError when x.size() != model.n_features.
double predict_raw(const Model& model, std::span<const double> x);
double predict_proba(const Model& model, std::span<const double> x);
// 1 iff predict_proba(x) >= threshold. Throws ConfigError unless threshold is
// in (0, 1).
Label predict_label(const Model& model, std::span<const double> x, double threshold = 0.5);

// -sum [ y ln p + (1 - y) ln(1 - p) ].
double total_loss(std::span<const Label> labels, std::span<const double> probs);
// Same quantity from log-odds, stable when p saturates.
double total_loss_from_scores(std::span<const Label> labels, std::span<const double> scores);

}  // namespace gbc
