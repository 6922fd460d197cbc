#include "gbc/trace_io.hpp"

#include <string>

namespace gbc {

namespace {

constexpr int kDecimals = 6;

std::string fixed(double v) { return format_fixed(v, kDecimals); }

}  // namespace

std::string format_trace(const TrainingTrace& trace, const Dataset& dataset) {
  const auto& labels = dataset.labels();
  std::string out;
  bool first = true;
  for (const auto& it : trace.iterations) {
    const auto m = std::to_string(it.iteration);
    if (!first) out += '\n';
    first = false;

    out += "[iteration " + m + " residuals]\nindex";
    for (const auto& name : dataset.feature_names()) {
      out += ',' + name;
    }
    out += ",y,p_prev,r\n";
    for (std::size_t i = 0; i < it.instances.size(); ++i) {
      const auto& rec = it.instances[i];
      out += std::to_string(i + 1);
      for (const double x : dataset.row(i)) {
        out += ',' + fixed(x);
      }
      out += ',' + std::to_string(labels[i]) + ',' + fixed(rec.prev_prob) + ',' +
             fixed(rec.residual) + '\n';
    }

    out += "\n[iteration " + m + " leaves]\n";
    out += "iteration,leaf_id,members,numerator,denominator,gamma\n";
    for (const auto& leaf : it.leaves) {
      std::string members;
      for (const auto k : leaf.members) {
        if (!members.empty()) members += ' ';
        members += std::to_string(k + 1);
      }
      out += m + ',' + std::to_string(leaf.leaf_id) + ',' + members + ',' + fixed(leaf.numerator) +
             ',' + fixed(leaf.denominator) + ',' + fixed(leaf.gamma) + '\n';
    }

    out += "\n[iteration " + m + " summary]\niteration,total_loss\n";
    out += m + ',' + fixed(it.total_loss) + '\n';
  }
  return out;
}

}  // namespace gbc
