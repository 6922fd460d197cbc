#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gbc {

using Label = std::uint8_t;

// Read-only row-major view over an n x d block of feature values.
class FeatureMatrix {
 public:
  FeatureMatrix(std::span<const double> values, std::size_t rows, std::size_t cols);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double at(std::size_t row, std::size_t col) const { return values_[row * cols_ + col]; }
  std::span<const double> row(std::size_t i) const { return values_.subspan(i * cols_, cols_); }

 private:
  std::span<const double> values_;
  std::size_t rows_;
  std::size_t cols_;
};

// Training or prediction input: n rows of d finite features, with optional
// binary labels. Immutable once constructed; the constructor enforces every
// invariant and throws DataError otherwise.
class Dataset {
 public:
  Dataset(std::vector<std::string> feature_names, std::vector<double> features,
          std::optional<std::vector<Label>> labels);

  std::size_t rows() const { return features_.size() / feature_names_.size(); }
  std::size_t cols() const { return feature_names_.size(); }

  const std::vector<std::string>& feature_names() const { return feature_names_; }
  const std::vector<double>& values() const { return features_; }
  FeatureMatrix matrix() const { return {features_, rows(), cols()}; }
  std::span<const double> row(std::size_t i) const { return matrix().row(i); }

  bool has_labels() const { return labels_.has_value(); }
  // Throws DataError when the dataset carries no labels.
  const std::vector<Label>& labels() const;

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::vector<std::string> feature_names_;
  std::vector<double> features_;
  std::optional<std::vector<Label>> labels_;
};

enum class LabelPolicy {
  kRequired,  // last column must be "label"
  kOptional,  // strip a trailing "label" column when present
};

// Parsed CSV before Dataset validation. Zero data rows are allowed here so
// that callers can treat a header-only file as an empty batch.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<double> features;  // row-major, label column removed
  std::optional<std::vector<Label>> labels;
  std::size_t rows = 0;

  std::size_t cols() const;
};

CsvTable parse_csv(std::string_view text, LabelPolicy policy);
CsvTable read_csv(const std::filesystem::path& path, LabelPolicy policy);

// Throws DataError when the table has no rows.
Dataset to_dataset(CsvTable table);

Dataset load_csv(const std::filesystem::path& path, bool expect_labels);

// Writes header and rows with "\n" endings and shortest round-trip decimals.
std::string to_csv(const Dataset& dataset);
void save_csv(const Dataset& dataset, const std::filesystem::path& path);

// Shortest decimal representation that parses back to the same double.
std::string format_shortest(double value);
// Fixed-point with the given number of decimals, locale-independent.
std::string format_fixed(double value, int decimals);

}  // namespace gbc
