#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "vspyct/common.hpp"

namespace vspyct {

/// In-memory regression dataset: an n x d feature matrix and a scalar
/// target per row.
struct Dataset {
  Eigen::MatrixXd features;
  Eigen::VectorXd target;
  std::vector<std::string> feature_names;
  std::string name;

  int rows() const { return static_cast<int>(features.rows()); }
  int cols() const { return static_cast<int>(features.cols()); }

  /// Throws InvalidInput on empty data, shape mismatch, or non-finite values.
  void validate() const;

  /// Row subset (copies the selected rows).
  Dataset subset(const std::vector<int>& indices) const;
};

/// Loads a CSV file with a required header row. `target_column` selects the
/// target by name; empty means the last column. All remaining columns must
/// be numeric ('.' decimal separator). Throws InvalidInput on missing file,
/// missing column, or unparseable / non-finite values.
Dataset load_csv(const std::string& path, const std::string& target_column = "");

/// Writes a dataset back out as CSV (target appended as the last column).
void save_csv(const Dataset& dataset, const std::string& path,
              const std::string& target_name = "y");

/// Feature-only CSV: header required, every column numeric. Used for
/// prediction inputs, where no target column is expected.
struct FeatureTable {
  Eigen::MatrixXd values;
  std::vector<std::string> names;
};
FeatureTable load_feature_csv(const std::string& path);

/// Per-feature affine map to zero mean / unit variance, learned on training
/// data and replayed at prediction time. Constant features keep std = 1 so
/// the map stays invertible.
struct Standardizer {
  Eigen::VectorXd mean;
  Eigen::VectorXd std;

  static Standardizer fit(const Eigen::MatrixXd& x);

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const;
  int dim() const { return static_cast<int>(mean.size()); }
};

}  // namespace vspyct
