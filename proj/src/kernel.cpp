#include "vspyct/kernel.hpp"

#include <algorithm>
#include <cmath>

namespace vspyct {

namespace {
constexpr double kLogParamLo = -30.0;
constexpr double kLogParamHi = 30.0;
const double kLogNoiseFloor = std::log(1e-8);
}  // namespace

void KernelParams::clamp() {
  log_lengthscale = std::clamp(log_lengthscale, kLogParamLo, kLogParamHi);
  log_signal_var = std::clamp(log_signal_var, kLogParamLo, kLogParamHi);
  log_linear_var = std::clamp(log_linear_var, kLogParamLo, kLogParamHi);
  log_noise_var = std::clamp(log_noise_var, kLogNoiseFloor, kLogParamHi);
}

double kernel_eval(const KernelParams& params, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& xp) {
  const double sq_dist = (x - xp).squaredNorm();
  const double ls = params.lengthscale();
  double k = params.signal_var() * std::exp(-sq_dist / (2.0 * ls * ls));
  if (params.family == KernelFamily::kLinearPlusRbf) {
    k += params.linear_var() * x.dot(xp);
  }
  return k;
}

Eigen::MatrixXd kernel_matrix(const KernelParams& params, const Eigen::MatrixXd& x) {
  const Eigen::Index n = x.rows();
  Eigen::MatrixXd k(n, n);
  const double ls = params.lengthscale();
  const double inv_two_ls2 = 1.0 / (2.0 * ls * ls);
  const double sv = params.signal_var();
  for (Eigen::Index i = 0; i < n; ++i) {
    k(i, i) = sv;
    for (Eigen::Index j = 0; j < i; ++j) {
      const double sq = (x.row(i) - x.row(j)).squaredNorm();
      const double v = sv * std::exp(-sq * inv_two_ls2);
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  if (params.family == KernelFamily::kLinearPlusRbf) {
    k.noalias() += params.linear_var() * (x * x.transpose());
  }
  return k;
}

Eigen::VectorXd kernel_cross(const KernelParams& params, const Eigen::MatrixXd& x_train,
                             const Eigen::VectorXd& x) {
  const Eigen::Index n = x_train.rows();
  Eigen::VectorXd k(n);
  const double ls = params.lengthscale();
  const double inv_two_ls2 = 1.0 / (2.0 * ls * ls);
  const double sv = params.signal_var();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double sq = (x_train.row(i).transpose() - x).squaredNorm();
    k(i) = sv * std::exp(-sq * inv_two_ls2);
  }
  if (params.family == KernelFamily::kLinearPlusRbf) {
    k.noalias() += params.linear_var() * (x_train * x);
  }
  return k;
}

}  // namespace vspyct
