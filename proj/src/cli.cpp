#include "gbc/cli.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <string_view>

#include <CLI11.hpp>

#include "gbc/booster.hpp"
#include "gbc/dataset.hpp"
#include "gbc/errors.hpp"
#include "gbc/model_io.hpp"
#include "gbc/node_math.hpp"
#include "gbc/trace_io.hpp"

namespace gbc::cli {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

template <typename T>
bool parse_whole(std::string_view s, T& value) {
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  return ec == std::errc{} && ptr == s.data() + s.size() && !s.empty();
}

void write_text(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) {
    throw IoError("cannot open " + path + " for writing");
  }
  file << text;
  if (!file) {
    throw IoError("error writing " + path);
  }
}

struct TrainArgs {
  std::string data;
  TrainConfig config;
  std::string out;
  std::string trace;
  std::string force_splits;
};

struct PredictArgs {
  std::string model;
  std::string data;
  double threshold = 0.5;
  std::string out;
};

struct TraceArgs {
  std::string model;
  std::string data;
  std::string out;
};

int cmd_train(const TrainArgs& args, std::ostream& out) {
  TrainConfig config = args.config;
  if (!args.force_splits.empty()) {
    config.forced_splits = parse_forced_splits(args.force_splits);
  }
  config.validate();

  const auto dataset = load_csv(args.data, true);
  const auto result = train(dataset, config);
  if (!args.out.empty()) {
    save_model(result.model, args.out);
  }
  if (!args.trace.empty()) {
    write_text(format_trace(result.trace, dataset), args.trace, out);
  }
  out << format_fixed(result.trace.iterations.back().total_loss, 6) << '\n';
  return kOk;
}

int cmd_predict(const PredictArgs& args, std::ostream& out) {
  if (!(args.threshold > 0.0 && args.threshold < 1.0)) {
    throw ConfigError("--threshold must lie in (0, 1)");
  }
  const auto model = load_model(args.model);
  const auto table = read_csv(args.data, LabelPolicy::kOptional);
  if (table.cols() != model.n_features) {
    throw DataError(args.data + ": " + std::to_string(table.cols()) +
                    " feature columns, model expects " + std::to_string(model.n_features));
  }

  std::string csv = "index,raw_score,probability,label\n";
  const FeatureMatrix rows(table.features, table.rows, table.cols());
  for (std::size_t i = 0; i < rows.rows(); ++i) {
    const double raw = predict_raw(model, rows.row(i));
    const double p = sigmoid(raw);
    csv += std::to_string(i + 1) + ',' + format_fixed(raw, 6) + ',' + format_fixed(p, 6) + ',' +
           (p >= args.threshold ? '1' : '0') + '\n';
  }
  write_text(csv, args.out, out);
  return kOk;
}

int cmd_trace(const TraceArgs& args, std::ostream& out) {
  const auto model = load_model(args.model);
  const auto dataset = load_csv(args.data, true);
  write_text(format_trace(replay_trace(model, dataset), dataset), args.out, out);
  return kOk;
}

}  // namespace

std::vector<ForcedSplit> parse_forced_splits(const std::string& text) {
  std::vector<ForcedSplit> splits;
  std::string_view rest = text;
  while (true) {
    const auto semi = rest.find(';');
    const auto pair = trim(rest.substr(0, semi));
    const bool last = semi == std::string_view::npos;
    if (!(pair.empty() && last && !splits.empty())) {
      const auto colon = pair.find(':');
      ForcedSplit split;
      if (colon == std::string_view::npos ||
          !parse_whole(trim(pair.substr(0, colon)), split.feature_index) ||
          !parse_whole(trim(pair.substr(colon + 1)), split.threshold) ||
          !std::isfinite(split.threshold)) {
        throw ConfigError("--force-splits: expected featureIndex:threshold, got '" +
                          std::string(pair) + "'");
      }
      splits.push_back(split);
    }
    if (last) break;
    rest.remove_prefix(semi + 1);
  }
  return splits;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Gradient boosting classifier with Newton leaf values", "gbc"};
  app.require_subcommand(1);

  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "Fit an ensemble to labelled CSV data");
  train_cmd->add_option("--data", train_args.data, "Training CSV (last column 'label')")
      ->required();
  train_cmd->add_option("--trees", train_args.config.n_trees, "Number of trees")
      ->capture_default_str();
  train_cmd->add_option("--learning-rate", train_args.config.learning_rate, "Shrinkage in (0, 1]")
      ->capture_default_str();
  train_cmd->add_option("--max-depth", train_args.config.max_depth, "Maximum tree depth")
      ->capture_default_str();
  train_cmd->add_option("--min-leaf", train_args.config.min_leaf, "Minimum instances per leaf")
      ->capture_default_str();
  train_cmd->add_option("--out", train_args.out, "Model file to write");
  train_cmd->add_option("--trace", train_args.trace, "Trace CSV to write");
  train_cmd->add_option("--force-splits", train_args.force_splits,
                        "Per-iteration stump splits, \"f:t;f:t;...\"");

  PredictArgs predict_args;
  auto* predict_cmd = app.add_subcommand("predict", "Score CSV rows with a saved model");
  predict_cmd->add_option("--model", predict_args.model, "Model file")->required();
  predict_cmd->add_option("--data", predict_args.data, "Input CSV")->required();
  predict_cmd->add_option("--threshold", predict_args.threshold, "Class-1 probability cutoff")
      ->capture_default_str();
  predict_cmd->add_option("--out", predict_args.out, "Output CSV (default: stdout)");

  TraceArgs trace_args;
  auto* trace_cmd = app.add_subcommand("trace", "Replay boosting bookkeeping for a saved model");
  trace_cmd->add_option("--model", trace_args.model, "Model file")->required();
  trace_cmd->add_option("--data", trace_args.data, "Labelled CSV")->required();
  trace_cmd->add_option("--out", trace_args.out, "Output CSV (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (train_cmd->parsed()) return cmd_train(train_args, out);
    if (predict_cmd->parsed()) return cmd_predict(predict_args, out);
    return cmd_trace(trace_args, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kData;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const ModelVersionError& e) {
    err << "model error: " << e.what() << '\n';
    return kModelVersion;
  } catch (const ModelFormatError& e) {
    err << "model error: " << e.what() << '\n';
    return kIo;
  }
}

}  // namespace gbc::cli
