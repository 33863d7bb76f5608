#pragma once

#include <Eigen/Core>
#include <optional>
#include <vector>

#include "vspyct/dataset.hpp"
#include "vspyct/gp.hpp"

namespace vspyct {

struct Tree;

/// Mahalanobis support region of a leaf: training centroid and the inverse
/// of the regularized empirical covariance. `cov` keeps the regularized
/// matrix itself so the inverse can be recomputed identically after
/// serialization.
struct SupportRegion {
  Eigen::VectorXd centroid;
  Eigen::MatrixXd cov;      // Sigma + lambda I
  Eigen::MatrixXd inv_cov;  // (Sigma + lambda I)^-1, symmetric SPD
  double reg = 0.0;
  int n_points = 0;
};

/// Centroid + regularized covariance inverse for a leaf's training inputs.
/// Covariance uses the n-1 denominator (zero matrix for a single point);
/// lambda > 0 keeps the inverse well defined.
SupportRegion fit_support(const Eigen::MatrixXd& x_leaf, double lambda);

/// Recomputes inv_cov from cov. Fitting and deserialization share this
/// routine so a reloaded region reproduces distances bit for bit.
void refresh_support_inverse(SupportRegion& region);

/// Regularization for a leaf: scale * mean(diag(Sigma)) with an absolute
/// floor of 1e-9.
double support_reg_for(const Eigen::MatrixXd& x_leaf, double scale);

/// sqrt((x - centroid)^T inv_cov (x - centroid)), >= 0.
double mahalanobis(const SupportRegion& region, const Eigen::VectorXd& x);

/// Soft gate sigmoid((d - tau) / temperature) in (0, 1), increasing in d.
double gate_weight(double dist, double tau, double temperature);

/// Terminal node payload: constant prototype, optional GP, support region,
/// and the gate parameters.
struct Leaf {
  int id = -1;
  std::vector<int> train_indices;
  double prototype = 0.0;  // mean target of the routed training subset
  std::optional<GpLeafModel> gp;
  SupportRegion support;
  double tau = 1.0;
  double temperature = 0.25;
  double noise_floor = 1e-10;  // epsilon^2
};

struct GatedPrediction {
  double mean = 0.0;
  double var = 0.0;
  double weight = 0.0;  // gate weight actually applied
};

/// Blends prototype and GP prediction by the gate weight; leaves without a
/// GP always predict (prototype, noise_floor) with weight 0.
GatedPrediction gated_predict(const Leaf& leaf, const Eigen::VectorXd& x);

/// Global tau: 99th percentile of the Mahalanobis distance from every
/// training point to the centroid of its own leaf, floored at 1e-6.
/// Requires at least 2 training points and fit-time leaf memberships.
double calibrate_tau(const Tree& tree, const Dataset& dataset);

}  // namespace vspyct
