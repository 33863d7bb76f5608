#include "vspyct/gating.hpp"

#include <Eigen/Cholesky>
#include <cmath>

#include "vspyct/tree.hpp"

namespace vspyct {

SupportRegion fit_support(const Eigen::MatrixXd& x_leaf, double lambda) {
  if (x_leaf.rows() < 1) {
    throw InvalidInput("fit_support needs at least one point");
  }
  if (!(lambda > 0.0)) {
    throw InvalidInput("fit_support: lambda must be > 0");
  }
  const Eigen::Index n = x_leaf.rows();
  const Eigen::Index d = x_leaf.cols();

  SupportRegion region;
  region.centroid = x_leaf.colwise().mean();
  region.reg = lambda;
  region.n_points = static_cast<int>(n);

  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
  if (n > 1) {
    const Eigen::MatrixXd centered = x_leaf.rowwise() - region.centroid.transpose();
    cov = (centered.transpose() * centered) / static_cast<double>(n - 1);
  }
  cov.diagonal().array() += lambda;
  region.cov = cov;
  refresh_support_inverse(region);
  return region;
}

void refresh_support_inverse(SupportRegion& region) {
  const Eigen::Index d = region.cov.rows();
  Eigen::LLT<Eigen::MatrixXd> llt(region.cov);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("support covariance is not positive definite");
  }
  Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(d, d));
  region.inv_cov = 0.5 * (inv + inv.transpose());
}

double support_reg_for(const Eigen::MatrixXd& x_leaf, double scale) {
  const Eigen::Index n = x_leaf.rows();
  const Eigen::Index d = x_leaf.cols();
  double mean_diag = 0.0;
  if (n > 1) {
    const Eigen::RowVectorXd mean = x_leaf.colwise().mean();
    for (Eigen::Index j = 0; j < d; ++j) {
      double ss = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double diff = x_leaf(i, j) - mean(j);
        ss += diff * diff;
      }
      mean_diag += ss / static_cast<double>(n - 1);
    }
    mean_diag /= static_cast<double>(d);
  }
  return std::max(scale * mean_diag, 1e-9);
}

double mahalanobis(const SupportRegion& region, const Eigen::VectorXd& x) {
  const Eigen::VectorXd diff = x - region.centroid;
  const double quad = diff.dot(region.inv_cov * diff);
  return std::sqrt(std::max(quad, 0.0));
}

double gate_weight(double dist, double tau, double temperature) {
  return sigmoid((dist - tau) / temperature);
}

GatedPrediction gated_predict(const Leaf& leaf, const Eigen::VectorXd& x) {
  GatedPrediction out;
  double gp_mean = 0.0;
  double gp_var = 0.0;
  if (leaf.gp) {
    const double d = mahalanobis(leaf.support, x);
    out.weight = gate_weight(d, leaf.tau, leaf.temperature);
    const GpPrediction p = gp_predict(*leaf.gp, x);
    gp_mean = p.mean;
    gp_var = p.var;
  } else {
    out.weight = 0.0;
  }
  out.mean = (1.0 - out.weight) * leaf.prototype + out.weight * gp_mean;
  out.var = (1.0 - out.weight) * leaf.noise_floor + out.weight * gp_var;
  return out;
}

double calibrate_tau(const Tree& tree, const Dataset& dataset) {
  if (dataset.rows() < 2) {
    throw InvalidInput("calibrate_tau needs at least 2 training points");
  }
  const Eigen::MatrixXd x_std = tree.standardizer.apply(dataset.features);
  std::vector<double> dists;
  dists.reserve(static_cast<std::size_t>(dataset.rows()));
  for (const Leaf& leaf : tree.leaves) {
    for (int idx : leaf.train_indices) {
      dists.push_back(mahalanobis(leaf.support, x_std.row(idx).transpose()));
    }
  }
  if (dists.size() < 2) {
    throw InvalidInput("calibrate_tau: tree has no recorded leaf memberships");
  }
  const double tau = percentile(std::move(dists), 0.99);
  return std::max(tau, 1e-6);
}

}  // namespace vspyct
