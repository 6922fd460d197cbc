#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "gbc/booster.hpp"

namespace gbc {

// Versioned JSON model document:
//
//   {
//     "format_version": 1,
//     "learning_rate": 0.1,
//     "n_features": 1,
//     "feature_names": ["x"],
//     "trees": [
//       {"feature_index": 0, "threshold": 3.5,
//        "left":  {"leaf_id": 1, "gamma": 0.6666666666666666},
//        "right": {"leaf_id": 2, "gamma": -0.6666666666666666}},
//       ...
//     ]
//   }
//
// Doubles are written in shortest round-trip form, so deserialization
// reproduces every threshold and gamma bit for bit.
std::string serialize_model(const Model& model);

// Throws ModelVersionError for an unknown format_version and
// ModelFormatError (with the byte offset for syntax errors) otherwise.
Model deserialize_model(std::string_view text);

void save_model(const Model& model, const std::filesystem::path& path);
Model load_model(const std::filesystem::path& path);

}  // namespace gbc
