#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gbc/dataset.hpp"

namespace gbc {

inline constexpr double kHessianFloor = 1e-12;
inline constexpr double kOracleBound = 30.0;
inline constexpr double kOracleTolerance = 1e-10;

// Logistic function, evaluated so that exp() only ever sees a non-positive
// argument.
double sigmoid(double z);

// log(1 + e^z) without overflow.
double softplus(double z);

// y - p, elementwise.
std::vector<double> residuals(std::span<const Label> labels, std::span<const double> probs);

// The instances that share one terminal node, as seen before the node's value
// is added: labels, prior log-odds and prior probabilities.
class LeafSample {
 public:
  // Throws std::invalid_argument on empty or mismatched inputs, or when
  // probs[k] differs from sigmoid(scores[k]) by more than 1e-12.
  LeafSample(std::vector<Label> labels, std::vector<double> prior_scores,
             std::vector<double> prior_probs);

  static LeafSample from_scores(std::vector<Label> labels, std::vector<double> prior_scores);

  std::size_t size() const { return labels_.size(); }
  const std::vector<Label>& labels() const { return labels_; }
  const std::vector<double>& prior_scores() const { return prior_scores_; }
  const std::vector<double>& prior_probs() const { return prior_probs_; }

 private:
  std::vector<Label> labels_;
  std::vector<double> prior_scores_;
  std::vector<double> prior_probs_;
};

struct NewtonStep {
  double numerator = 0.0;    // sum of residuals
  double denominator = 0.0;  // sum of p(1 - p), before flooring
  double gamma = 0.0;
};

// One Newton step on the leaf loss from gamma = 0:
//   gamma = sum(y - p) / max(sum p(1 - p), kHessianFloor)
NewtonStep newton_step(const LeafSample& sample);
double gamma_newton(const LeafSample& sample);

// Cross-entropy of the leaf after adding gamma to every prior score,
//   sum_k [ -y_k (F_k + gamma) + log(1 + e^(F_k + gamma)) ].
double leaf_loss(double gamma, const LeafSample& sample);

// d leaf_loss / d gamma = sum_k [ sigmoid(F_k + gamma) - y_k ].
double leaf_loss_derivative(double gamma, const LeafSample& sample);

// Exact minimiser of leaf_loss on [-bound, bound] by bisection on the
// (strictly increasing) derivative. If the derivative keeps one sign over the
// interval, returns the endpoint whose |derivative| is smaller.
// Throws std::invalid_argument for non-positive bound or tol.
double gamma_oracle(const LeafSample& sample, double bound = kOracleBound,
                    double tol = kOracleTolerance);

}  // namespace gbc
