#include "vspyct/gp.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <vector>

#include "vspyct/optim.hpp"

namespace vspyct {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112353;

Eigen::MatrixXd noisy_gram(const Eigen::MatrixXd& x, const KernelParams& params) {
  Eigen::MatrixXd k = kernel_matrix(params, x);
  k.diagonal().array() += params.noise_var();
  return k;
}

double log_det_from_chol(const Eigen::MatrixXd& l) {
  return 2.0 * l.diagonal().array().log().sum();
}

}  // namespace

Eigen::MatrixXd cholesky_with_jitter(const Eigen::MatrixXd& a) {
  const Eigen::Index n = a.rows();
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() == Eigen::Success) return llt.matrixL();

  const double scale = a.trace() / static_cast<double>(n);
  double jitter = 1e-8 * scale;
  const double max_jitter = 1e-2 * scale;
  while (jitter <= max_jitter) {
    Eigen::MatrixXd jittered = a;
    jittered.diagonal().array() += jitter;
    llt.compute(jittered);
    if (llt.info() == Eigen::Success) return llt.matrixL();
    jitter *= 10.0;
  }
  throw NumericalError("Cholesky factorization failed after jitter escalation");
}

GpLeafModel make_gp_model(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                          const KernelParams& params) {
  GpLeafModel model;
  model.x_train = x;
  model.y_train = y;
  model.params = params;
  const Eigen::MatrixXd k = noisy_gram(x, params);
  model.chol_l = cholesky_with_jitter(k);
  const Eigen::VectorXd residual = y.array() - params.prior_mean;
  model.alpha = model.chol_l.transpose().triangularView<Eigen::Upper>().solve(
      model.chol_l.triangularView<Eigen::Lower>().solve(residual));
  return model;
}

KernelParams init_kernel_params(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                KernelFamily family) {
  const Eigen::Index n = x.rows();
  KernelParams params;
  params.family = family;

  // Median pairwise distance; fall back to 1 when degenerate.
  double median_dist = 1.0;
  if (n >= 2) {
    std::vector<double> dists;
    dists.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i + 1; j < n; ++j) {
        dists.push_back((x.row(i) - x.row(j)).norm());
      }
    }
    std::nth_element(dists.begin(), dists.begin() + dists.size() / 2, dists.end());
    const double med = dists[dists.size() / 2];
    if (med > 1e-12) median_dist = med;
  }
  params.log_lengthscale = std::log(median_dist);

  const double y_mean = y.mean();
  double y_var = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double d = y(i) - y_mean;
    y_var += d * d;
  }
  y_var /= static_cast<double>(std::max<Eigen::Index>(y.size(), 1));

  params.log_signal_var = std::log(std::max(y_var, 1e-4));
  params.log_noise_var = std::log(std::max(0.1 * y_var, 1e-6));
  params.log_linear_var = std::log(0.1);
  params.prior_mean = y_mean;
  params.clamp();
  return params;
}

double gp_log_marginal_likelihood(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                  const KernelParams& params) {
  const Eigen::Index n = x.rows();
  const Eigen::MatrixXd l = cholesky_with_jitter(noisy_gram(x, params));
  const Eigen::VectorXd residual = y.array() - params.prior_mean;
  const Eigen::VectorXd alpha = l.transpose().triangularView<Eigen::Upper>().solve(
      l.triangularView<Eigen::Lower>().solve(residual));
  return -0.5 * residual.dot(alpha) - 0.5 * log_det_from_chol(l) -
         0.5 * static_cast<double>(n) * kLog2Pi;
}

LmlGradient gp_lml_gradient(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                            const KernelParams& params) {
  const Eigen::Index n = x.rows();
  const double ls = params.lengthscale();
  const double sv = params.signal_var();
  const double inv_two_ls2 = 1.0 / (2.0 * ls * ls);

  Eigen::MatrixXd sq_dist(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    sq_dist(i, i) = 0.0;
    for (Eigen::Index j = 0; j < i; ++j) {
      const double sq = (x.row(i) - x.row(j)).squaredNorm();
      sq_dist(i, j) = sq;
      sq_dist(j, i) = sq;
    }
  }
  const Eigen::MatrixXd k_rbf = sv * (-sq_dist * inv_two_ls2).array().exp().matrix();

  Eigen::MatrixXd k = k_rbf;
  Eigen::MatrixXd k_lin;
  if (params.family == KernelFamily::kLinearPlusRbf) {
    k_lin.noalias() = params.linear_var() * (x * x.transpose());
    k += k_lin;
  }
  k.diagonal().array() += params.noise_var();

  const Eigen::MatrixXd l = cholesky_with_jitter(k);
  const Eigen::VectorXd residual = y.array() - params.prior_mean;
  const Eigen::VectorXd alpha = l.transpose().triangularView<Eigen::Upper>().solve(
      l.triangularView<Eigen::Lower>().solve(residual));

  // K^-1 via the factor, then A = alpha alpha^T - K^-1 for the trace identity
  // dL/dtheta = 0.5 tr(A dK/dtheta).
  Eigen::MatrixXd k_inv = l.transpose().triangularView<Eigen::Upper>().solve(
      l.triangularView<Eigen::Lower>().solve(
          Eigen::MatrixXd::Identity(n, n)));
  const Eigen::MatrixXd a = alpha * alpha.transpose() - k_inv;

  LmlGradient grad;
  grad.lml = -0.5 * residual.dot(alpha) - 0.5 * log_det_from_chol(l) -
             0.5 * static_cast<double>(n) * kLog2Pi;
  grad.d_prior_mean = alpha.sum();
  grad.d_log_signal_var = 0.5 * a.cwiseProduct(k_rbf).sum();
  grad.d_log_lengthscale =
      0.5 * a.cwiseProduct(k_rbf.cwiseProduct(sq_dist) / (ls * ls)).sum();
  grad.d_log_noise_var = 0.5 * params.noise_var() * a.trace();
  if (params.family == KernelFamily::kLinearPlusRbf) {
    grad.d_log_linear_var = 0.5 * a.cwiseProduct(k_lin).sum();
  }
  return grad;
}

namespace {

Eigen::VectorXd pack(const KernelParams& p) {
  Eigen::VectorXd v(5);
  v << p.prior_mean, p.log_lengthscale, p.log_signal_var, p.log_linear_var,
      p.log_noise_var;
  return v;
}

KernelParams unpack(const Eigen::VectorXd& v, KernelFamily family) {
  KernelParams p;
  p.family = family;
  p.prior_mean = v(0);
  p.log_lengthscale = v(1);
  p.log_signal_var = v(2);
  p.log_linear_var = v(3);
  p.log_noise_var = v(4);
  p.clamp();
  return p;
}

}  // namespace

GpLeafModel fit_gp(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                   KernelFamily family, int iters, double learning_rate) {
  if (x.rows() < 2) {
    throw InvalidInput("fit_gp needs at least 2 training points");
  }
  const KernelParams init = init_kernel_params(x, y, family);
  if (iters <= 0) {
    return make_gp_model(x, y, init);
  }

  Eigen::VectorXd theta = pack(init);
  KernelParams best = init;
  double best_lml = -std::numeric_limits<double>::infinity();
  Adam adam(theta.size(), learning_rate);

  for (int it = 0; it < iters; ++it) {
    const KernelParams current = unpack(theta, family);
    const LmlGradient g = gp_lml_gradient(x, y, current);
    if (g.lml > best_lml) {
      best_lml = g.lml;
      best = current;
    }
    Eigen::VectorXd grad(5);
    grad << g.d_prior_mean, g.d_log_lengthscale, g.d_log_signal_var,
        g.d_log_linear_var, g.d_log_noise_var;
    if (family == KernelFamily::kRbf) grad(3) = 0.0;
    grad = -grad;  // maximize
    adam.step(theta, grad);
    KernelParams clamped = unpack(theta, family);
    theta = pack(clamped);
  }
  // Last iterate still deserves a look.
  const KernelParams last = unpack(theta, family);
  if (gp_log_marginal_likelihood(x, y, last) > best_lml) best = last;

  return make_gp_model(x, y, best);
}

GpPrediction gp_predict(const GpLeafModel& model, const Eigen::VectorXd& x) {
  const Eigen::VectorXd k_star = kernel_cross(model.params, model.x_train, x);
  GpPrediction out;
  out.mean = model.params.prior_mean + k_star.dot(model.alpha);
  const Eigen::VectorXd v =
      model.chol_l.triangularView<Eigen::Lower>().solve(k_star);
  const double prior_var = kernel_eval(model.params, x, x);
  out.var = std::max(prior_var - v.squaredNorm(), 0.0);
  return out;
}

}  // namespace vspyct
