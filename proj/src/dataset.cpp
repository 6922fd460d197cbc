#include "gbc/dataset.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>
#include <utility>

#include "gbc/errors.hpp"

namespace gbc {

namespace {

constexpr std::string_view kLabelColumn = "label";

std::string cell_context(std::size_t row, std::string_view column) {
  std::ostringstream os;
  os << "row " << row << ", column \"" << column << "\"";
  return os.str();
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_cells(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(trim(line.substr(start)));
      return cells;
    }
    cells.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) {
      end = text.size();
    }
    auto line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') {
      line.remove_suffix(1);
    }
    lines.push_back(line);
    start = end + 1;
  }
  // Trailing blank lines carry no rows.
  while (!lines.empty() && trim(lines.back()).empty()) {
    lines.pop_back();
  }
  return lines;
}

double parse_cell(std::string_view cell, std::size_t row, std::string_view column) {
  if (cell.empty()) {
    throw DataError(cell_context(row, column) + ": missing value");
  }
  std::string_view digits = cell;
  if (digits.front() == '+') {
    digits.remove_prefix(1);
  }
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
  if (ec == std::errc::result_out_of_range) {
    throw DataError(cell_context(row, column) + ": value out of range: '" + std::string(cell) +
                    "'");
  }
  if (ec != std::errc{} || ptr != digits.data() + digits.size() || digits.empty()) {
    throw DataError(cell_context(row, column) + ": not a number: '" + std::string(cell) + "'");
  }
  if (!std::isfinite(value)) {
    throw DataError(cell_context(row, column) + ": non-finite value '" + std::string(cell) + "'");
  }
  return value;
}

void check_finite(std::span<const double> values, std::size_t cols) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      std::ostringstream os;
      os << "row " << (i / cols + 1) << ", feature " << (i % cols) << ": non-finite value";
      throw DataError(os.str());
    }
  }
}

}  // namespace

FeatureMatrix::FeatureMatrix(std::span<const double> values, std::size_t rows, std::size_t cols)
    : values_(values), rows_(rows), cols_(cols) {}

Dataset::Dataset(std::vector<std::string> feature_names, std::vector<double> features,
                 std::optional<std::vector<Label>> labels)
    : feature_names_(std::move(feature_names)),
      features_(std::move(features)),
      labels_(std::move(labels)) {
  if (feature_names_.empty()) {
    throw DataError("dataset needs at least one feature column");
  }
  if (features_.empty()) {
    throw DataError("dataset needs at least one row");
  }
  if (features_.size() % feature_names_.size() != 0) {
    throw DataError("feature values do not form complete rows");
  }
  check_finite(features_, cols());
  if (labels_) {
    if (labels_->size() != rows()) {
      throw DataError("label count does not match row count");
    }
    for (std::size_t i = 0; i < labels_->size(); ++i) {
      if ((*labels_)[i] > 1) {
        throw DataError(cell_context(i + 1, kLabelColumn) + ": label must be 0 or 1");
      }
    }
  }
}

const std::vector<Label>& Dataset::labels() const {
  if (!labels_) {
    throw DataError("dataset has no label column");
  }
  return *labels_;
}

std::size_t CsvTable::cols() const { return header.size(); }

CsvTable parse_csv(std::string_view text, LabelPolicy policy) {
  const auto lines = split_lines(text);
  if (lines.empty()) {
    throw DataError("empty file: missing header row");
  }

  const auto header_cells = split_cells(lines.front());
  const bool has_label = !header_cells.empty() && header_cells.back() == kLabelColumn;
  if (policy == LabelPolicy::kRequired && !has_label) {
    throw DataError("last column must be named \"label\"");
  }

  CsvTable table;
  for (std::size_t c = 0; c + (has_label ? 1 : 0) < header_cells.size(); ++c) {
    if (header_cells[c].empty()) {
      throw DataError("header column " + std::to_string(c + 1) + " has an empty name");
    }
    table.header.emplace_back(header_cells[c]);
  }
  if (table.header.empty()) {
    throw DataError("no feature columns");
  }
  if (has_label) {
    table.labels.emplace();
  }

  const std::size_t width = header_cells.size();
  for (std::size_t l = 1; l < lines.size(); ++l) {
    const std::size_t row = l;
    const auto cells = split_cells(lines[l]);
    if (cells.size() != width) {
      std::ostringstream os;
      os << "row " << row << ": expected " << width << " cells, found " << cells.size();
      throw DataError(os.str());
    }
    for (std::size_t c = 0; c < table.header.size(); ++c) {
      table.features.push_back(parse_cell(cells[c], row, table.header[c]));
    }
    if (has_label) {
      const double y = parse_cell(cells.back(), row, kLabelColumn);
      if (y != 0.0 && y != 1.0) {
        throw DataError(cell_context(row, kLabelColumn) + ": label must be 0 or 1, got '" +
                        std::string(cells.back()) + "'");
      }
      table.labels->push_back(static_cast<Label>(y));
    }
    ++table.rows;
  }
  return table;
}

CsvTable read_csv(const std::filesystem::path& path, LabelPolicy policy) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) {
    throw IoError("error reading " + path.string());
  }
  try {
    return parse_csv(buffer.str(), policy);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

Dataset to_dataset(CsvTable table) {
  if (table.rows == 0) {
    throw DataError("no data rows");
  }
  return Dataset(std::move(table.header), std::move(table.features), std::move(table.labels));
}

Dataset load_csv(const std::filesystem::path& path, bool expect_labels) {
  auto table = read_csv(path, expect_labels ? LabelPolicy::kRequired : LabelPolicy::kOptional);
  try {
    return to_dataset(std::move(table));
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::string format_shortest(double value) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ptr);
}

std::string format_fixed(double value, int decimals) {
  std::array<char, 400> buf{};
  const auto [ptr, ec] =
      std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::fixed, decimals);
  std::string s(buf.data(), ptr);
  // Normalise "-0.000000" so rounding noise never flips a sign in output.
  if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) {
    s.erase(0, 1);
  }
  return s;
}

std::string to_csv(const Dataset& dataset) {
  std::string out;
  for (std::size_t c = 0; c < dataset.cols(); ++c) {
    if (c > 0) {
      out += ',';
    }
    out += dataset.feature_names()[c];
  }
  if (dataset.has_labels()) {
    out += ",label";
  }
  out += '\n';
  for (std::size_t i = 0; i < dataset.rows(); ++i) {
    const auto row = dataset.row(i);
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0) {
        out += ',';
      }
      out += format_shortest(row[c]);
    }
    if (dataset.has_labels()) {
      out += ',';
      out += static_cast<char>('0' + dataset.labels()[i]);
    }
    out += '\n';
  }
  return out;
}

void save_csv(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot open " + path.string() + " for writing");
  }
  out << to_csv(dataset);
  if (!out) {
    throw IoError("error writing " + path.string());
  }
}

}  // namespace gbc
