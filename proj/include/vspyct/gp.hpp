#pragma once

#include <Eigen/Core>

#include "vspyct/config.hpp"
#include "vspyct/kernel.hpp"

namespace vspyct {

/// Exact GP regressor over a leaf's training block. chol_l is the lower
/// Cholesky factor of K + sigma_n^2 I (plus any jitter that was needed) and
/// alpha solves (K + sigma_n^2 I) alpha = y - m.
struct GpLeafModel {
  Eigen::MatrixXd x_train;
  Eigen::VectorXd y_train;
  KernelParams params;
  Eigen::MatrixXd chol_l;
  Eigen::VectorXd alpha;

  int size() const { return static_cast<int>(x_train.rows()); }
};

struct GpPrediction {
  double mean = 0.0;
  double var = 0.0;  // latent-function variance, observation noise excluded
};

/// Lower Cholesky factor of `a`, adding jitter 1e-8 * trace/n escalated x10
/// up to 1e-2 * trace/n on failure. Throws NumericalError if that is not
/// enough.
Eigen::MatrixXd cholesky_with_jitter(const Eigen::MatrixXd& a);

/// Builds the factored model at fixed hyperparameters (no optimization).
GpLeafModel make_gp_model(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                          const KernelParams& params);

/// Data-driven starting point: median-heuristic lengthscale, variance of y
/// for the signal, 0.1 * var(y) for the noise, mean(y) for the prior mean.
KernelParams init_kernel_params(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                KernelFamily family);

/// log p(y | X, params) through the Cholesky factor.
double gp_log_marginal_likelihood(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                  const KernelParams& params);

/// Value and analytic gradient of the log marginal likelihood with respect
/// to the log-space hyperparameters and the prior mean.
struct LmlGradient {
  double lml = 0.0;
  double d_prior_mean = 0.0;
  double d_log_lengthscale = 0.0;
  double d_log_signal_var = 0.0;
  double d_log_linear_var = 0.0;  // zero for the RBF family
  double d_log_noise_var = 0.0;
};

LmlGradient gp_lml_gradient(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                            const KernelParams& params);

/// Maximizes the log marginal likelihood with Adam for `iters` steps,
/// keeping the best-seen parameters (so the returned objective is never
/// below its value at initialization), and returns the refreshed model.
GpLeafModel fit_gp(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                   KernelFamily family, int iters, double learning_rate);

/// Posterior mean and variance at x: mean = m + k_*^T alpha,
/// var = k(x,x) - ||L^-1 k_*||^2 floored at zero.
GpPrediction gp_predict(const GpLeafModel& model, const Eigen::VectorXd& x);

}  // namespace vspyct
