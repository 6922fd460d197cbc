#include "gbc/model_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gbc/errors.hpp"

namespace gbc {

namespace {

using nlohmann::json;

json node_to_json(const RegressionTree& tree, std::size_t index) {
  const auto& node = tree.nodes()[index];
  if (node.is_leaf()) {
    return {{"leaf_id", node.leaf_id}, {"gamma", node.gamma}};
  }
  return {{"feature_index", node.feature},
          {"threshold", node.threshold},
          {"left", node_to_json(tree, static_cast<std::size_t>(node.left))},
          {"right", node_to_json(tree, static_cast<std::size_t>(node.right))}};
}

double finite_number(const json& j, const char* key, const std::string& where) {
  const auto it = j.find(key);
  if (it == j.end() || !it->is_number()) {
    throw ModelFormatError(where + ": missing numeric \"" + key + "\"");
  }
  const double v = it->get<double>();
  if (!std::isfinite(v)) {
    throw ModelFormatError(where + ": \"" + key + "\" is not finite");
  }
  return v;
}

std::size_t count(const json& j, const char* key, const std::string& where) {
  const auto it = j.find(key);
  if (it == j.end() || !it->is_number_unsigned()) {
    throw ModelFormatError(where + ": \"" + key + "\" must be a non-negative integer");
  }
  return it->get<std::size_t>();
}

// Appends the subtree in pre-order so children always follow their parent.
void append_nodes(const json& j, std::size_t n_features, const std::string& where,
                  std::vector<RegressionTree::Node>& nodes, int depth) {
  if (!j.is_object()) {
    throw ModelFormatError(where + ": tree node must be an object");
  }
  if (depth > 64) {
    throw ModelFormatError(where + ": tree deeper than 64 levels");
  }
  const auto index = nodes.size();
  nodes.emplace_back();
  if (j.contains("leaf_id")) {
    const auto leaf_id = count(j, "leaf_id", where);
    nodes[index].leaf_id = static_cast<int>(leaf_id);
    nodes[index].gamma = finite_number(j, "gamma", where);
    return;
  }
  const auto feature = count(j, "feature_index", where);
  if (feature >= n_features) {
    throw ModelFormatError(where + ": feature_index " + std::to_string(feature) +
                           " out of range");
  }
  if (!j.contains("left") || !j.contains("right")) {
    throw ModelFormatError(where + ": split node needs \"left\" and \"right\"");
  }
  nodes[index].feature = feature;
  nodes[index].threshold = finite_number(j, "threshold", where);
  nodes[index].left = static_cast<int>(nodes.size());
  append_nodes(j.at("left"), n_features, where, nodes, depth + 1);
  nodes[index].right = static_cast<int>(nodes.size());
  append_nodes(j.at("right"), n_features, where, nodes, depth + 1);
}

RegressionTree tree_from_json(const json& j, std::size_t n_features, std::size_t tree_index) {
  const std::string where = "tree " + std::to_string(tree_index);
  std::vector<RegressionTree::Node> nodes;
  append_nodes(j, n_features, where, nodes, 0);
  std::vector<int> stored_ids;
  for (const auto& n : nodes) {
    if (n.is_leaf()) stored_ids.push_back(n.leaf_id);
  }
  RegressionTree tree(std::move(nodes));
  // Pre-order visits leaves left to right, matching the tree's own numbering.
  for (std::size_t k = 0; k < stored_ids.size(); ++k) {
    if (stored_ids[k] != static_cast<int>(k + 1)) {
      throw ModelFormatError(where + ": leaf ids must run 1..J from left to right");
    }
  }
  return tree;
}

}  // namespace

std::string serialize_model(const Model& model) {
  json trees = json::array();
  for (const auto& tree : model.trees) {
    trees.push_back(node_to_json(tree, 0));
  }
  const json doc = {{"format_version", model.format_version},
                    {"learning_rate", model.learning_rate},
                    {"n_features", model.n_features},
                    {"feature_names", model.feature_names},
                    {"trees", std::move(trees)}};
  return doc.dump(2) + "\n";
}

Model deserialize_model(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ModelFormatError("malformed model file at byte offset " + std::to_string(e.byte) + ": " +
                           e.what());
  }
  if (!doc.is_object()) {
    throw ModelFormatError("model file must hold a JSON object");
  }
  const auto version = doc.find("format_version");
  if (version == doc.end() || !version->is_number_integer()) {
    throw ModelFormatError("model file has no integer format_version");
  }
  if (version->get<long long>() != kModelFormatVersion) {
    throw ModelVersionError("unsupported model format_version " +
                            std::to_string(version->get<long long>()) + " (expected " +
                            std::to_string(kModelFormatVersion) + ")");
  }

  Model model;
  model.format_version = kModelFormatVersion;
  model.learning_rate = finite_number(doc, "learning_rate", "model");
  model.n_features = count(doc, "n_features", "model");
  if (model.n_features == 0) {
    throw ModelFormatError("model: n_features must be positive");
  }
  try {
    model.feature_names = doc.at("feature_names").get<std::vector<std::string>>();
  } catch (const json::exception&) {
    throw ModelFormatError("model: \"feature_names\" must be an array of strings");
  }
  if (model.feature_names.size() != model.n_features) {
    throw ModelFormatError("model: feature_names length differs from n_features");
  }
  const auto trees = doc.find("trees");
  if (trees == doc.end() || !trees->is_array()) {
    throw ModelFormatError("model: \"trees\" must be an array");
  }
  for (std::size_t m = 0; m < trees->size(); ++m) {
    try {
      model.trees.push_back(tree_from_json((*trees)[m], model.n_features, m));
    } catch (const std::invalid_argument& e) {
      throw ModelFormatError("tree " + std::to_string(m) + ": " + e.what());
    }
  }
  return model;
}

void save_model(const Model& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot open " + path.string() + " for writing");
  }
  out << serialize_model(model);
  if (!out) {
    throw IoError("error writing " + path.string());
  }
}

Model load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) {
    throw IoError("error reading " + path.string());
  }
  return deserialize_model(buffer.str());
}

}  // namespace gbc
