#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "vspyct/common.hpp"

namespace vspyct {

enum class KernelFamily { kRbf, kLinearPlusRbf };

std::string kernel_family_name(KernelFamily family);
KernelFamily kernel_family_from_name(const std::string& name);

/// All knobs needed to fit a tree. Optional fields default to data-driven
/// calibration: tau -> 99th-percentile auto threshold, noise_floor ->
/// 1e-4 * var(y) with an absolute floor of 1e-10.
struct TreeConfig {
  int max_depth = 5;
  int min_samples_split = 10;
  int vi_epochs = 500;
  double learning_rate = 0.01;
  int mc_samples = 50;
  std::optional<double> tau;          // empty = auto calibration
  double temperature = 0.25;          // Mahalanobis units
  std::optional<double> noise_floor;  // empty = 1e-4 * var(y_train)
  KernelFamily kernel_family = KernelFamily::kRbf;
  int gp_iters = 75;
  double gp_learning_rate = 0.1;
  int min_leaf_gp = 5;
  double cov_reg = 1e-6;  // scale on mean diagonal covariance, floor 1e-9 absolute
  uint64_t seed = 0;
  int threads = 0;  // <= 0: use all hardware threads

  /// Throws InvalidInput when a field is out of range.
  void validate() const;
};

inline std::string kernel_family_name(KernelFamily family) {
  return family == KernelFamily::kRbf ? "rbf" : "lin-rbf";
}

inline KernelFamily kernel_family_from_name(const std::string& name) {
  if (name == "rbf") return KernelFamily::kRbf;
  if (name == "lin-rbf" || name == "lin_rbf" || name == "linear-rbf") {
    return KernelFamily::kLinearPlusRbf;
  }
  throw InvalidInput("unknown kernel family '" + name + "' (expected rbf or lin-rbf)");
}

inline void TreeConfig::validate() const {
  if (max_depth < 1) throw InvalidInput("max_depth must be >= 1");
  if (min_samples_split < 2) throw InvalidInput("min_samples_split must be >= 2");
  if (vi_epochs < 0) throw InvalidInput("vi_epochs must be >= 0");
  if (!(learning_rate > 0.0)) throw InvalidInput("learning_rate must be > 0");
  if (mc_samples < 1) throw InvalidInput("mc_samples must be >= 1");
  if (tau && !(*tau > 0.0)) throw InvalidInput("tau must be > 0");
  if (!(temperature > 0.0)) throw InvalidInput("temperature must be > 0");
  if (noise_floor && !(*noise_floor > 0.0)) throw InvalidInput("noise_floor must be > 0");
  if (gp_iters < 0) throw InvalidInput("gp_iters must be >= 0");
  if (!(gp_learning_rate > 0.0)) throw InvalidInput("gp_learning_rate must be > 0");
  if (min_leaf_gp < 2) throw InvalidInput("min_leaf_gp must be >= 2");
  if (!(cov_reg > 0.0)) throw InvalidInput("cov_reg must be > 0");
}

}  // namespace vspyct
