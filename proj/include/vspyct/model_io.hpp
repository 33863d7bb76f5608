#pragma once

#include <string>

#include "json.hpp"
#include "vspyct/tree.hpp"

namespace vspyct {

nlohmann::json config_to_json(const TreeConfig& config);
TreeConfig config_from_json(const nlohmann::json& j);

/// Full model as a versioned JSON document (format_version 1). Doubles are
/// emitted with round-trip precision; derived matrices (covariance inverse,
/// GP Cholesky factor and alpha) are rebuilt on load through the fitting
/// routines, so a reloaded model predicts bit-identically. Training row
/// indices are not persisted.
nlohmann::json tree_to_json(const Tree& tree);
Tree tree_from_json(const nlohmann::json& j);

void save_model(const Tree& tree, const std::string& path);
Tree load_model(const std::string& path);

}  // namespace vspyct
