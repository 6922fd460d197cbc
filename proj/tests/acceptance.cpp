// Acceptance suite: one line per criterion, non-zero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gbc/booster.hpp"
#include "gbc/model_io.hpp"
#include "gbc/node_math.hpp"
#include "gbc/regression_tree.hpp"
#include "oracles.hpp"

namespace {

constexpr double kFourDp = 5e-4;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void expect(bool ok, const std::string& what) {
    if (!ok) {
      if (pass) detail << what;
      pass = false;
    }
  }
  void near(double got, double want, double tol, const std::string& what) {
    if (std::abs(got - want) > tol) {
      std::ostringstream os;
      os.precision(10);
      os << what << ": got " << got << ", want " << want << " +/- " << tol;
      expect(false, os.str());
    }
  }
};

struct Criterion {
  int id;
  const char* name;
  double time_limit_s;
  std::function<void(Outcome&)> body;
};

gbc::Dataset table1() {
  return gbc::Dataset({"x"}, {1.3, 1.5, 3.0, 4.0, 6.5, 8.4},
                      std::vector<gbc::Label>{1, 0, 1, 0, 1, 0});
}

gbc::TrainConfig appendix_config() {
  gbc::TrainConfig config;
  config.n_trees = 3;
  config.learning_rate = 0.1;
  config.max_depth = 1;
  config.forced_splits = std::vector<gbc::ForcedSplit>{{0, 3.5}, {0, 2.25}, {0, 5.25}};
  return config;
}

std::vector<gbc::testing::RandomLeaf> random_leaves(std::uint64_t seed, int count) {
  std::mt19937_64 rng(seed);
  std::vector<gbc::testing::RandomLeaf> leaves;
  for (int i = 0; i < count; ++i) leaves.push_back(gbc::testing::random_mixed_leaf(rng, 20, 4.0));
  return leaves;
}

void appendix_reproduction(Outcome& o) {
  const auto [model, trace] = gbc::train(table1(), appendix_config());
  o.expect(trace.iterations.size() == 3, "expected three iterations");
  const auto& it1 = trace.iterations[0].leaves;
  o.near(it1[0].gamma, 2.0 / 3.0, 1e-12, "iteration 1 gamma_1");
  o.near(it1[1].gamma, -2.0 / 3.0, 1e-12, "iteration 1 gamma_2");
  const auto& it2 = trace.iterations[1].leaves;
  o.near(it2[0].gamma, -0.0669, kFourDp, "iteration 2 gamma_1");
  o.near(it2[1].gamma, 0.0334, kFourDp, "iteration 2 gamma_2");
  const auto& it3 = trace.iterations[2].leaves;
  o.near(it3[0].gamma, -0.0317, kFourDp, "iteration 3 gamma_1");
  o.near(it3[1].gamma, 0.0633, kFourDp, "iteration 3 gamma_2");
  const double final_probs[] = {0.5142, 0.5142, 0.5167, 0.4834, 0.4858, 0.4858};
  for (std::size_t i = 0; i < 6; ++i) {
    o.near(trace.iterations[2].instances[i].prob, final_probs[i], kFourDp,
           "final p of instance " + std::to_string(i + 1));
  }
}

void held_out_prediction(Outcome& o) {
  const auto model = gbc::train(table1(), appendix_config()).model;
  const double x = 7.0;
  o.near(gbc::predict_raw(model, {&x, 1}), -0.0570, kFourDp, "raw score at x=7");
  o.near(gbc::predict_proba(model, {&x, 1}), 0.4858, kFourDp, "probability at x=7");
  o.expect(gbc::predict_label(model, {&x, 1}, 0.5) == 0, "label at x=7 should be 0");
}

void taylor_sandwich(Outcome& o) {
  int upper_violations = 0;
  int lower_violations = 0;
  int count = 0;
  for (const auto& leaf : random_leaves(20240601, 1000)) {
    const auto sample = gbc::LeafSample::from_scores(leaf.labels, leaf.scores);
    const double g_star = gbc::gamma_oracle(sample);
    const double l_oracle = gbc::leaf_loss(g_star, sample);
    const double l_newton = gbc::leaf_loss(gbc::gamma_newton(sample), sample);
    const double l_zero = gbc::leaf_loss(0.0, sample);
    // The oracle's loss is within tol * |gamma error| of the true minimum.
    const double slack = gbc::kOracleTolerance * (1.0 + std::abs(g_star));
    if (l_oracle > l_newton + slack) ++lower_violations;
    if (l_newton > l_zero) ++upper_violations;
    ++count;
  }
  std::ostringstream os;
  os << count << " leaves: " << lower_violations << " with loss(oracle) > loss(newton), "
     << upper_violations << " with loss(newton) > loss(0)";
  o.expect(lower_violations == 0 && upper_violations == 0, os.str());
  if (o.pass) o.detail << os.str();
}

void gradient_check(Outcome& o) {
  constexpr double h = 1e-5;
  int violations = 0;
  int count = 0;
  double worst = 0.0;
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> at(-2.0, 2.0);
  for (const auto& leaf : random_leaves(20240601, 1000)) {
    const auto sample = gbc::LeafSample::from_scores(leaf.labels, leaf.scores);
    for (const double g : {0.0, at(rng)}) {
      const double fd = (gbc::leaf_loss(g + h, sample) - gbc::leaf_loss(g - h, sample)) / (2 * h);
      const double d = gbc::leaf_loss_derivative(g, sample);
      // Relative to |d|, floored at 1 so near-zero derivatives are judged in
      // absolute terms.
      const double err = std::abs(fd - d) / std::max(1.0, std::abs(d));
      worst = std::max(worst, err);
      if (err > 1e-6) ++violations;
      ++count;
    }
  }
  std::ostringstream os;
  os << count << " points, worst relative error " << worst;
  o.expect(violations == 0, os.str());
  if (o.pass) o.detail << os.str();
}

void analytic_oracle(Outcome& o) {
  const auto sample = gbc::LeafSample::from_scores({1, 1, 0}, {0.0, 0.0, 0.0});
  o.near(gbc::gamma_oracle(sample), std::log(2.0), 1e-8, "oracle gamma");
  o.near(gbc::gamma_newton(sample), 2.0 / 3.0, 1e-12, "newton gamma");
}

void greedy_split_equivalence(Outcome& o) {
  // The worked example's first residuals favour 1.4, not the assumed 3.5.
  const std::vector<double> x{1.3, 1.5, 3.0, 4.0, 6.5, 8.4};
  const std::vector<double> r{0.5, -0.5, 0.5, -0.5, 0.5, -0.5};
  std::vector<std::size_t> all(6);
  std::iota(all.begin(), all.end(), std::size_t{0});
  const auto table2 = gbc::best_split(gbc::FeatureMatrix(x, 6, 1), r, all);
  o.expect(table2.has_value(), "no split found for the worked-example residuals");
  if (table2) {
    o.near(table2->threshold, 1.4, 1e-12, "worked-example threshold");
    o.near(table2->sse_after, 1.2, 1e-12, "worked-example SSE");
    o.expect(table2->threshold != 3.5, "greedy split unexpectedly matched 3.5");
  }
  std::vector<std::vector<double>> rows;
  for (const double v : x) rows.push_back({v});
  const auto oracle_table2 = gbc::testing::exhaustive_split(rows, r);
  o.expect(oracle_table2 && std::abs(oracle_table2->threshold - 1.4) < 1e-12,
           "oracle disagrees on the worked-example split");

  std::mt19937_64 rng(6);
  int mismatches = 0;
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 50)(rng);
    const std::size_t d = std::uniform_int_distribution<std::size_t>(1, 4)(rng);
    std::vector<std::vector<double>> data(n, std::vector<double>(d));
    std::vector<double> flat;
    std::vector<double> res(n);
    std::uniform_int_distribution<int> grid(0, 12);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (auto& v : data[i]) v = grid(rng) * 0.25;
      flat.insert(flat.end(), data[i].begin(), data[i].end());
      res[i] = u(rng);
    }
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    const auto got = gbc::best_split(gbc::FeatureMatrix(flat, n, d), res, idx);
    const auto want = gbc::testing::exhaustive_split(data, res);
    const bool agree =
        got.has_value() == want.has_value() &&
        (!got || (got->feature_index == want->feature &&
                  std::abs(got->threshold - want->threshold) <= 1e-12 &&
                  std::abs(got->sse_after - want->sse) <= 1e-9 * (1.0 + want->sse)));
    if (!agree) ++mismatches;
  }
  o.expect(mismatches == 0, std::to_string(mismatches) + " of 200 random cases disagree");
  if (o.pass) o.detail << "200 random cases agree";
}

void monotone_loss(Outcome& o) {
  int violations = 0;
  int runs = 0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    std::mt19937_64 rng(seed);
    const std::size_t n = std::uniform_int_distribution<std::size_t>(2, 64)(rng);
    const std::size_t d = std::uniform_int_distribution<std::size_t>(1, 4)(rng);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    std::vector<double> x(n * d);
    for (auto& v : x) v = u(rng);
    std::vector<double> w(d);
    for (auto& v : w) v = u(rng);
    std::vector<gbc::Label> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      double z = 0.0;
      for (std::size_t c = 0; c < d; ++c) z += w[c] * x[i * d + c];
      y[i] = std::bernoulli_distribution(gbc::sigmoid(z))(rng) ? 1 : 0;
    }
    std::vector<std::string> names;
    for (std::size_t c = 0; c < d; ++c) names.push_back("f" + std::to_string(c));
    const gbc::Dataset ds(names, x, y);

    for (const int depth : {1, 2}) {
      gbc::TrainConfig config;
      config.n_trees = 20;
      config.learning_rate = 0.1;
      config.max_depth = depth;
      const auto trace = gbc::train(ds, config).trace;
      double prev = gbc::total_loss_from_scores(y, std::vector<double>(n, 0.0));
      for (const auto& it : trace.iterations) {
        if (it.total_loss > prev) ++violations;
        prev = it.total_loss;
      }
      ++runs;
    }
  }
  std::ostringstream os;
  os << runs << " runs x 20 iterations, " << violations << " increases";
  o.expect(violations == 0, os.str());
  if (o.pass) o.detail << os.str();
}

void persistence_round_trip(Outcome& o) {
  const auto model = gbc::train(table1(), appendix_config()).model;
  const auto restored = gbc::deserialize_model(gbc::serialize_model(model));
  int mismatches = 0;
  for (int k = 0; k < 100; ++k) {
    const double x = 10.0 * k / 99.0;
    if (gbc::predict_raw(model, {&x, 1}) != gbc::predict_raw(restored, {&x, 1})) ++mismatches;
  }
  o.expect(mismatches == 0, std::to_string(mismatches) + " of 100 grid points differ");
  if (o.pass) o.detail << "100 grid points bit-identical";
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "appendix end-to-end reproduction", 1.0, appendix_reproduction},
      {2, "held-out prediction at x=7", 1.0, held_out_prediction},
      {3, "Taylor-vs-exact loss sandwich", 5.0, taylor_sandwich},
      {4, "gradient check against central differences", 5.0, gradient_check},
      {5, "analytic oracle case", 1.0, analytic_oracle},
      {6, "greedy split equals exhaustive enumeration", 5.0, greedy_split_equivalence},
      {7, "monotone training loss", 30.0, monotone_loss},
      {8, "persistence round trip", 1.0, persistence_round_trip},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    Outcome outcome;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.body(outcome);
    } catch (const std::exception& e) {
      outcome.expect(false, std::string("exception: ") + e.what());
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (seconds > c.time_limit_s) {
      outcome.expect(false, "took " + std::to_string(seconds) + " s");
    }
    if (!outcome.pass) ++failures;
    std::printf("[%s] AC%d %s (%.3f s) %s\n", outcome.pass ? "PASS" : "FAIL", c.id, c.name,
                seconds, outcome.detail.str().c_str());
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
