#include "gbc/node_math.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace gbc {

double sigmoid(double z) {
  if (z >= 0.0) {
    return 1.0 / (1.0 + std::exp(-z));
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

std::vector<double> residuals(std::span<const Label> labels, std::span<const double> probs) {
  if (labels.size() != probs.size()) {
    throw std::invalid_argument("residuals: labels and probabilities differ in length");
  }
  std::vector<double> r(labels.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    r[i] = static_cast<double>(labels[i]) - probs[i];
  }
  return r;
}

LeafSample::LeafSample(std::vector<Label> labels, std::vector<double> prior_scores,
                       std::vector<double> prior_probs)
    : labels_(std::move(labels)),
      prior_scores_(std::move(prior_scores)),
      prior_probs_(std::move(prior_probs)) {
  if (labels_.empty()) {
    throw std::invalid_argument("LeafSample: empty sample");
  }
  if (prior_scores_.size() != labels_.size() || prior_probs_.size() != labels_.size()) {
    throw std::invalid_argument("LeafSample: labels, scores and probabilities differ in length");
  }
  for (std::size_t k = 0; k < labels_.size(); ++k) {
    if (labels_[k] > 1) {
      throw std::invalid_argument("LeafSample: label must be 0 or 1");
    }
    if (!std::isfinite(prior_scores_[k]) ||
        std::abs(prior_probs_[k] - sigmoid(prior_scores_[k])) > 1e-12) {
      throw std::invalid_argument("LeafSample: probability does not match sigmoid(score)");
    }
  }
}

LeafSample LeafSample::from_scores(std::vector<Label> labels, std::vector<double> prior_scores) {
  std::vector<double> probs(prior_scores.size());
  std::transform(prior_scores.begin(), prior_scores.end(), probs.begin(), sigmoid);
  return LeafSample(std::move(labels), std::move(prior_scores), std::move(probs));
}

NewtonStep newton_step(const LeafSample& sample) {
  NewtonStep step;
  const auto& y = sample.labels();
  const auto& p = sample.prior_probs();
  for (std::size_t k = 0; k < y.size(); ++k) {
    step.numerator += static_cast<double>(y[k]) - p[k];
    step.denominator += p[k] * (1.0 - p[k]);
  }
  step.gamma = step.numerator / std::max(step.denominator, kHessianFloor);
  return step;
}

double gamma_newton(const LeafSample& sample) { return newton_step(sample).gamma; }

double leaf_loss(double gamma, const LeafSample& sample) {
  const auto& y = sample.labels();
  const auto& f = sample.prior_scores();
  double loss = 0.0;
  for (std::size_t k = 0; k < y.size(); ++k) {
    const double z = f[k] + gamma;
    // -y z + log(1 + e^z), written as softplus of the signed margin so each
    // term is computed without cancellation.
    loss += softplus(y[k] == 1 ? -z : z);
  }
  return loss;
}

double leaf_loss_derivative(double gamma, const LeafSample& sample) {
  const auto& y = sample.labels();
  const auto& f = sample.prior_scores();
  double d = 0.0;
  for (std::size_t k = 0; k < y.size(); ++k) {
    d += sigmoid(f[k] + gamma) - static_cast<double>(y[k]);
  }
  return d;
}

double gamma_oracle(const LeafSample& sample, double bound, double tol) {
  if (!(bound > 0.0) || !std::isfinite(bound)) {
    throw std::invalid_argument("gamma_oracle: bound must be positive and finite");
  }
  if (!(tol > 0.0)) {
    throw std::invalid_argument("gamma_oracle: tol must be positive");
  }

  double lo = -bound;
  double hi = bound;
  const double d_lo = leaf_loss_derivative(lo, sample);
  const double d_hi = leaf_loss_derivative(hi, sample);
  if (d_lo >= 0.0 || d_hi <= 0.0) {
    // No interior root: the minimum over the interval sits at an endpoint.
    if (std::abs(d_lo) <= tol) return lo;
    if (std::abs(d_hi) <= tol) return hi;
    return std::abs(d_lo) < std::abs(d_hi) ? lo : hi;
  }

  // d(lo) < 0 < d(hi) and d is strictly increasing.
  double mid = 0.5 * (lo + hi);
  while (true) {
    mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) {
      break;  // interval collapsed to adjacent doubles
    }
    const double d = leaf_loss_derivative(mid, sample);
    if (std::abs(d) <= tol) {
      break;
    }
    (d < 0.0 ? lo : hi) = mid;
  }
  return mid;
}

}  // namespace gbc
