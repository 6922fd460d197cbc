#include "gbc/booster.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "gbc/errors.hpp"
#include "gbc/node_math.hpp"

namespace gbc {

namespace {

LeafSample gather(const std::vector<std::size_t>& members, std::span<const Label> labels,
                  const TrainingState& state) {
  std::vector<Label> y;
  std::vector<double> f;
  std::vector<double> p;
  y.reserve(members.size());
  f.reserve(members.size());
  p.reserve(members.size());
  for (const auto k : members) {
    y.push_back(labels[k]);
    f.push_back(state.scores[k]);
    p.push_back(state.probs[k]);
  }
  return LeafSample(std::move(y), std::move(f), std::move(p));
}

// One boosting step over a tree whose structure is already fixed. When
// `assign_gammas` is set the leaf values are computed and written into the
// tree; otherwise the tree's existing values are used.
IterationRecord boost_step(RegressionTree& tree, bool assign_gammas, double learning_rate,
                           const Dataset& dataset, const std::vector<std::size_t>& all,
                           TrainingState& state) {
  const auto& labels = dataset.labels();
  const auto n = dataset.rows();

  IterationRecord record;
  record.instances.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    record.instances[i].prev_prob = state.probs[i];
    record.instances[i].residual = state.residuals[i];
  }

  const auto membership = leaf_assignment(tree, dataset.matrix(), all);
  std::vector<double> step(n, 0.0);
  for (const auto& [leaf_id, members] : membership) {
    LeafRecord leaf{leaf_id, members, 0.0, 0.0, 0.0};
    if (!members.empty()) {
      const auto newton = newton_step(gather(members, labels, state));
      leaf.numerator = newton.numerator;
      leaf.denominator = newton.denominator;
      leaf.gamma = newton.gamma;
    }
    if (assign_gammas) {
      tree.set_leaf_value(leaf_id, leaf.gamma);
    } else {
      leaf.gamma = tree.leaf_value(leaf_id);
    }
    for (const auto k : members) {
      step[k] = learning_rate * leaf.gamma;
      record.instances[k].leaf_id = leaf_id;
    }
    record.leaves.push_back(std::move(leaf));
  }

  for (std::size_t i = 0; i < n; ++i) {
    state.scores[i] += step[i];
    state.probs[i] = sigmoid(state.scores[i]);
    record.instances[i].score = state.scores[i];
    record.instances[i].prob = state.probs[i];
  }
  record.total_loss = total_loss_from_scores(labels, state.scores);
  return record;
}

void prepare_residuals(std::span<const Label> labels, TrainingState& state) {
  state.residuals = residuals(labels, state.probs);
}

}  // namespace

void TrainConfig::validate() const {
  if (n_trees < 1) {
    throw ConfigError("number of trees must be at least 1");
  }
  if (!(learning_rate > 0.0 && learning_rate <= 1.0)) {
    throw ConfigError("learning rate must lie in (0, 1]");
  }
  if (max_depth < 1) {
    throw ConfigError("max depth must be at least 1");
  }
  if (min_leaf < 1) {
    throw ConfigError("min leaf size must be at least 1");
  }
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw ConfigError("classification threshold must lie in (0, 1)");
  }
  if (forced_splits) {
    if (forced_splits->size() != static_cast<std::size_t>(n_trees)) {
      std::ostringstream os;
      os << "forced splits give " << forced_splits->size() << " splits for " << n_trees
         << " trees";
      throw ConfigError(os.str());
    }
    if (max_depth != 1) {
      throw ConfigError("forced splits require max depth 1");
    }
    for (const auto& s : *forced_splits) {
      if (!std::isfinite(s.threshold)) {
        throw ConfigError("forced split threshold must be finite");
      }
    }
  }
}

TrainingState::TrainingState(std::size_t n)
    : scores(n, 0.0), probs(n, sigmoid(0.0)), residuals(n, 0.0) {}

TrainResult train(const Dataset& dataset, const TrainConfig& config) {
  config.validate();
  const auto& labels = dataset.labels();
  if (config.forced_splits) {
    for (const auto& s : *config.forced_splits) {
      if (s.feature_index >= dataset.cols()) {
        throw ConfigError("forced split feature index " + std::to_string(s.feature_index) +
                          " exceeds feature count " + std::to_string(dataset.cols()));
      }
    }
  }

  const auto n = dataset.rows();
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});

  TrainResult result;
  result.model.learning_rate = config.learning_rate;
  result.model.n_features = dataset.cols();
  result.model.feature_names = dataset.feature_names();
  result.model.trees.reserve(static_cast<std::size_t>(config.n_trees));

  const TreeParams params{config.max_depth, config.min_leaf};
  TrainingState state(n);
  for (int m = 1; m <= config.n_trees; ++m) {
    prepare_residuals(labels, state);
    RegressionTree tree =
        config.forced_splits
            ? forced_stump(dataset.matrix(), (*config.forced_splits)[static_cast<std::size_t>(m - 1)])
            : fit_tree(dataset.matrix(), state.residuals, all, params);
    auto record = boost_step(tree, true, config.learning_rate, dataset, all, state);
    record.iteration = m;
    result.trace.iterations.push_back(std::move(record));
    result.model.trees.push_back(std::move(tree));
  }
  return result;
}

TrainingTrace replay_trace(const Model& model, const Dataset& dataset) {
  if (dataset.cols() != model.n_features) {
    throw DataError("data has " + std::to_string(dataset.cols()) + " features, model expects " +
                    std::to_string(model.n_features));
  }
  const auto& labels = dataset.labels();
  const auto n = dataset.rows();
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});

  TrainingTrace trace;
  TrainingState state(n);
  int m = 0;
  for (auto tree : model.trees) {
    prepare_residuals(labels, state);
    auto record = boost_step(tree, false, model.learning_rate, dataset, all, state);
    record.iteration = ++m;
    trace.iterations.push_back(std::move(record));
  }
  return trace;
}

double predict_raw(const Model& model, std::span<const double> x) {
  if (x.size() != model.n_features) {
    throw ConfigError("input has " + std::to_string(x.size()) + " features, model expects " +
                      std::to_string(model.n_features));
  }
  double score = 0.0;
  for (const auto& tree : model.trees) {
    score += model.learning_rate * tree.apply(x).gamma;
  }
  return score;
}

double predict_proba(const Model& model, std::span<const double> x) {
  return sigmoid(predict_raw(model, x));
}

Label predict_label(const Model& model, std::span<const double> x, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw ConfigError("classification threshold must lie in (0, 1)");
  }
  return predict_proba(model, x) >= threshold ? 1 : 0;
}

double total_loss(std::span<const Label> labels, std::span<const double> probs) {
  double loss = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    loss -= labels[i] == 1 ? std::log(probs[i]) : std::log1p(-probs[i]);
  }
  return loss;
}

double total_loss_from_scores(std::span<const Label> labels, std::span<const double> scores) {
  double loss = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    loss += softplus(labels[i] == 1 ? -scores[i] : scores[i]);
  }
  return loss;
}

}  // namespace gbc
