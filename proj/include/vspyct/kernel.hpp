#pragma once

#include <Eigen/Core>

#include "vspyct/config.hpp"

namespace vspyct {

/// Kernel hyperparameters in log space plus the constant prior mean.
/// log_linear_var is only meaningful for the LinearPlusRbf family.
struct KernelParams {
  KernelFamily family = KernelFamily::kRbf;
  double log_lengthscale = 0.0;
  double log_signal_var = 0.0;
  double log_linear_var = 0.0;
  double log_noise_var = 0.0;
  double prior_mean = 0.0;

  double lengthscale() const { return std::exp(log_lengthscale); }
  double signal_var() const { return std::exp(log_signal_var); }
  double linear_var() const { return std::exp(log_linear_var); }
  double noise_var() const { return std::exp(log_noise_var); }

  /// Keeps every exp() positive and finite; noise variance floored at 1e-8.
  void clamp();
};

/// k(x, x'): RBF s^2 exp(-||x-x'||^2 / (2 l^2)), plus v x.x' for
/// LinearPlusRbf.
double kernel_eval(const KernelParams& params, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& xp);

/// Full Gram matrix K(X, X) without observation noise.
Eigen::MatrixXd kernel_matrix(const KernelParams& params, const Eigen::MatrixXd& x);

/// Train-test kernel vector k_* = [k(x_i, x)]_i.
Eigen::VectorXd kernel_cross(const KernelParams& params, const Eigen::MatrixXd& x_train,
                             const Eigen::VectorXd& x);

}  // namespace vspyct
