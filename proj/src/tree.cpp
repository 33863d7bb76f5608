#include "vspyct/tree.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <utility>

#include "vspyct/gp.hpp"
#include "vspyct/optim.hpp"

namespace vspyct {

namespace {

constexpr double kMinSideMass = 1e-12;
constexpr double kMinLogStd = -20.0;
constexpr double kMaxLogStd = 3.0;

double subset_variance(const Eigen::VectorXd& y, const std::vector<int>& idx) {
  if (idx.empty()) return 0.0;
  double mean = 0.0;
  for (int i : idx) mean += y[i];
  mean /= static_cast<double>(idx.size());
  double ss = 0.0;
  for (int i : idx) {
    const double d = y[i] - mean;
    ss += d * d;
  }
  return ss / static_cast<double>(idx.size());
}

/// Soft impurity of a candidate split and its gradient with respect to the
/// per-row logits z_i = w.x_i + b. Membership p_i = sigmoid(z_i) weights each
/// row's squared deviation from its side's soft mean; the total is normalized
/// by n so node losses are comparable across depths.
double soft_impurity_logit_grad(const Eigen::VectorXd& z,
                                const Eigen::VectorXd& y,
                                Eigen::VectorXd& grad_z) {
  const int n = static_cast<int>(z.size());
  const double inv_n = 1.0 / static_cast<double>(n);
  Eigen::VectorXd p(n);
  for (int i = 0; i < n; ++i) p[i] = sigmoid(z[i]);

  const double s_r = std::max(p.sum(), kMinSideMass);
  const double s_l = std::max(static_cast<double>(n) - p.sum(), kMinSideMass);
  const double m_r = p.dot(y) / s_r;
  const double m_l = (y.sum() - p.dot(y)) / s_l;

  double impurity = 0.0;
  grad_z.resize(n);
  for (int i = 0; i < n; ++i) {
    const double dr = y[i] - m_r;
    const double dl = y[i] - m_l;
    impurity += (p[i] * dr * dr + (1.0 - p[i]) * dl * dl) * inv_n;
    // Soft means are critical points of the weighted sums, so their implicit
    // dependence on p contributes nothing to the gradient.
    grad_z[i] = (dr * dr - dl * dl) * inv_n * p[i] * (1.0 - p[i]);
  }
  return impurity;
}

/// Ridge-regression direction onto the centered target, unit-normalized.
/// Gives the optimizer a data-informed starting mean instead of a random one.
Eigen::VectorXd init_direction(const Eigen::MatrixXd& x,
                               const Eigen::VectorXd& y) {
  const int d = static_cast<int>(x.cols());
  const Eigen::VectorXd yc = y.array() - y.mean();
  Eigen::MatrixXd gram = x.transpose() * x;
  gram.diagonal().array() += 1e-3 * static_cast<double>(x.rows());
  Eigen::VectorXd w = gram.llt().solve(x.transpose() * yc);
  const double norm = w.norm();
  if (!(norm > 1e-12)) return Eigen::VectorXd::Zero(d);
  return w / norm;
}

struct PackedPosterior {
  // Layout: [w_mean (d), w_log_std (d), b_mean, b_log_std].
  static Eigen::VectorXd pack(const SplitPosterior& q) {
    const int d = static_cast<int>(q.w_mean.size());
    Eigen::VectorXd theta(2 * d + 2);
    theta.segment(0, d) = q.w_mean;
    theta.segment(d, d) = q.w_log_std;
    theta[2 * d] = q.b_mean;
    theta[2 * d + 1] = q.b_log_std;
    return theta;
  }
  static SplitPosterior unpack(const Eigen::VectorXd& theta) {
    const int d = (static_cast<int>(theta.size()) - 2) / 2;
    SplitPosterior q;
    q.w_mean = theta.segment(0, d);
    q.w_log_std = theta.segment(d, d);
    q.b_mean = theta[2 * d];
    q.b_log_std = theta[2 * d + 1];
    return q;
  }
};

void clamp_log_stds(Eigen::VectorXd& theta) {
  const int d = (static_cast<int>(theta.size()) - 2) / 2;
  for (int j = d; j < 2 * d; ++j)
    theta[j] = std::clamp(theta[j], kMinLogStd, kMaxLogStd);
  theta[2 * d + 1] = std::clamp(theta[2 * d + 1], kMinLogStd, kMaxLogStd);
}

}  // namespace

SplitPosterior fit_split(const Eigen::MatrixXd& x_std, const Eigen::VectorXd& y,
                         const TreeConfig& config, Rng& rng) {
  const int n = static_cast<int>(x_std.rows());
  const int d = static_cast<int>(x_std.cols());
  if (n < 2) throw InvalidInput("fit_split requires at least 2 rows");
  if (y.size() != n) throw InvalidInput("fit_split feature/target size mismatch");

  SplitPosterior init;
  init.w_mean = init_direction(x_std, y);
  init.w_log_std = Eigen::VectorXd::Constant(d, -2.0);
  init.b_mean = 0.0;
  init.b_log_std = -2.0;

  Eigen::VectorXd theta = PackedPosterior::pack(init);
  Adam opt(static_cast<int>(theta.size()), config.learning_rate);
  const double beta = 1.0 / static_cast<double>(n);

  Eigen::VectorXd eps_w(d), grad_z, grad(theta.size());
  for (int epoch = 0; epoch < config.vi_epochs; ++epoch) {
    for (int j = 0; j < d; ++j) eps_w[j] = rng.normal();
    const double eps_b = rng.normal();

    const auto w_mean = theta.segment(0, d);
    const Eigen::VectorXd w_std = theta.segment(d, d).array().exp();
    const double b_std = std::exp(theta[2 * d + 1]);
    const Eigen::VectorXd w = w_mean + w_std.cwiseProduct(eps_w);
    const double b = theta[2 * d] + b_std * eps_b;

    const Eigen::VectorXd z = (x_std * w).array() + b;
    soft_impurity_logit_grad(z, y, grad_z);

    const Eigen::VectorXd grad_w = x_std.transpose() * grad_z;
    const double grad_b = grad_z.sum();

    grad.segment(0, d) = grad_w;
    grad.segment(d, d) = grad_w.cwiseProduct(eps_w).cwiseProduct(w_std);
    grad[2 * d] = grad_b;
    grad[2 * d + 1] = grad_b * eps_b * b_std;

    // KL(q || N(0, I)) gradient: d/dmu = mu, d/dlogsigma = sigma^2 - 1.
    grad.segment(0, d) += beta * w_mean;
    grad.segment(d, d) +=
        beta * (w_std.array().square() - 1.0).matrix();
    grad[2 * d] += beta * theta[2 * d];
    grad[2 * d + 1] += beta * (b_std * b_std - 1.0);

    opt.step(theta, grad);
    clamp_log_stds(theta);
  }
  return PackedPosterior::unpack(theta);
}

SplitParams sample_split(const SplitPosterior& posterior, Rng& rng) {
  const int d = static_cast<int>(posterior.w_mean.size());
  SplitParams s;
  s.w.resize(d);
  for (int j = 0; j < d; ++j)
    s.w[j] = posterior.w_mean[j] + std::exp(posterior.w_log_std[j]) * rng.normal();
  s.b = posterior.b_mean + std::exp(posterior.b_log_std) * rng.normal();
  return s;
}

int route_standardized(const Tree& tree, const Eigen::VectorXd& x_std, Rng& rng) {
  int node = tree.root;
  while (!tree.nodes[node].is_leaf) {
    const TreeNode& nd = tree.nodes[node];
    const SplitParams s = sample_split(nd.posterior, rng);
    const double rho = sigmoid(s.w.dot(x_std) + s.b);
    node = (rho <= 0.5) ? nd.left : nd.right;
  }
  return tree.nodes[node].leaf_id;
}

int route(const Tree& tree, const Eigen::VectorXd& x_raw, Rng& rng) {
  return route_standardized(tree, tree.standardizer.apply(x_raw), rng);
}

int route_mean_standardized(const Tree& tree, const Eigen::VectorXd& x_std) {
  int node = tree.root;
  while (!tree.nodes[node].is_leaf) {
    const TreeNode& nd = tree.nodes[node];
    const double rho =
        sigmoid(nd.posterior.w_mean.dot(x_std) + nd.posterior.b_mean);
    node = (rho <= 0.5) ? nd.left : nd.right;
  }
  return tree.nodes[node].leaf_id;
}

int route_mean(const Tree& tree, const Eigen::VectorXd& x_raw) {
  return route_mean_standardized(tree, tree.standardizer.apply(x_raw));
}

int Tree::depth() const {
  // Iterative depth-first walk; node arena is preorder so children follow
  // their parent, but we rely only on the links.
  int max_depth = 0;
  std::vector<std::pair<int, int>> stack{{root, 0}};
  while (!stack.empty()) {
    auto [id, depth] = stack.back();
    stack.pop_back();
    const TreeNode& nd = nodes[id];
    if (nd.is_leaf) {
      max_depth = std::max(max_depth, depth);
    } else {
      stack.push_back({nd.left, depth + 1});
      stack.push_back({nd.right, depth + 1});
    }
  }
  return max_depth;
}

int Tree::leaves_with_gp() const {
  int count = 0;
  for (const Leaf& leaf : leaves)
    if (leaf.gp.has_value()) ++count;
  return count;
}

namespace {

struct TreeBuilder {
  const Eigen::MatrixXd& x_std;
  const Eigen::VectorXd& y;
  const TreeConfig& config;
  Rng& rng;
  Tree& tree;

  int build(std::vector<int> indices, int depth) {
    const int n = static_cast<int>(indices.size());
    const double parent_var = subset_variance(y, indices);
    const bool can_split = depth < config.max_depth &&
                           n >= config.min_samples_split && parent_var > 0.0;
    if (can_split) {
      Eigen::MatrixXd xs(n, x_std.cols());
      Eigen::VectorXd ys(n);
      for (int i = 0; i < n; ++i) {
        xs.row(i) = x_std.row(indices[i]);
        ys[i] = y[indices[i]];
      }
      SplitPosterior posterior = fit_split(xs, ys, config, rng);

      // Partition at the posterior mean. Fit-time structure must be
      // deterministic; routing stochasticity belongs to prediction.
      std::vector<int> left_idx, right_idx;
      for (int i = 0; i < n; ++i) {
        const double rho = sigmoid(posterior.w_mean.dot(xs.row(i)) +
                                   posterior.b_mean);
        (rho <= 0.5 ? left_idx : right_idx).push_back(indices[i]);
      }
      const bool both_sides = !left_idx.empty() && !right_idx.empty();
      if (both_sides) {
        const double child_var =
            (static_cast<double>(left_idx.size()) * subset_variance(y, left_idx) +
             static_cast<double>(right_idx.size()) *
                 subset_variance(y, right_idx)) /
            static_cast<double>(n);
        if (child_var < parent_var) {
          const int id = static_cast<int>(tree.nodes.size());
          tree.nodes.emplace_back();
          const int left = build(std::move(left_idx), depth + 1);
          const int right = build(std::move(right_idx), depth + 1);
          TreeNode& node = tree.nodes[id];
          node.is_leaf = false;
          node.posterior = std::move(posterior);
          node.left = left;
          node.right = right;
          return id;
        }
      }
    }

    const int id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    Leaf& leaf = tree.leaves.emplace_back();
    leaf.id = static_cast<int>(tree.leaves.size()) - 1;
    leaf.train_indices = std::move(indices);
    double mean = 0.0;
    for (int i : leaf.train_indices) mean += y[i];
    leaf.prototype = mean / static_cast<double>(leaf.train_indices.size());
    TreeNode& node = tree.nodes[id];
    node.is_leaf = true;
    node.leaf_id = leaf.id;
    return id;
  }
};

void fit_leaf_models(Tree& tree, const Eigen::MatrixXd& x_std,
                     const Eigen::VectorXd& y, double noise_floor) {
  const TreeConfig& cfg = tree.config;
  const int gp_threshold = std::max(cfg.min_leaf_gp, 2);
  const int threads = resolve_threads(cfg.threads);
  parallel_for(tree.leaves.size(), threads, [&](std::size_t li) {
    Leaf& leaf = tree.leaves[li];
    const int n = static_cast<int>(leaf.train_indices.size());
    Eigen::MatrixXd xl(n, x_std.cols());
    Eigen::VectorXd yl(n);
    for (int i = 0; i < n; ++i) {
      xl.row(i) = x_std.row(leaf.train_indices[i]);
      yl[i] = y[leaf.train_indices[i]];
    }
    leaf.support = fit_support(xl, support_reg_for(xl, cfg.cov_reg));
    leaf.temperature = cfg.temperature;
    leaf.noise_floor = noise_floor;
    if (n >= gp_threshold) {
      leaf.gp = fit_gp(xl, yl, cfg.kernel_family, cfg.gp_iters,
                       cfg.gp_learning_rate);
    }
  });
}

}  // namespace

Tree fit_tree(const Dataset& dataset, const TreeConfig& config) {
  config.validate();
  dataset.validate();
  if (dataset.rows() < 1) throw InvalidInput("fit_tree: dataset is empty");

  Tree tree;
  tree.config = config;
  tree.feature_names = dataset.feature_names;
  tree.standardizer = Standardizer::fit(dataset.features);

  const Eigen::MatrixXd x_std = tree.standardizer.apply(dataset.features);
  const Eigen::VectorXd& y = dataset.target;
  tree.target_stats.y_max = y.maxCoeff();
  tree.target_stats.y_mean = y.mean();

  const double y_var =
      population_variance(std::vector<double>(y.data(), y.data() + y.size()));
  const double noise_floor =
      config.noise_floor.has_value() ? *config.noise_floor
                                     : std::max(1e-4 * y_var, 1e-10);

  Rng rng(config.seed);
  std::vector<int> all(dataset.rows());
  for (int i = 0; i < dataset.rows(); ++i) all[i] = i;
  TreeBuilder builder{x_std, y, config, rng, tree};
  tree.root = builder.build(std::move(all), 0);

  fit_leaf_models(tree, x_std, y, noise_floor);

  const double tau =
      config.tau.has_value() ? *config.tau : calibrate_tau(tree, dataset);
  for (Leaf& leaf : tree.leaves) leaf.tau = tau;
  return tree;
}

Tree with_tau(const Tree& tree, double tau) {
  if (!(tau > 0.0)) throw InvalidInput("with_tau: tau must be positive");
  Tree copy = tree;
  for (Leaf& leaf : copy.leaves) leaf.tau = tau;
  return copy;
}

}  // namespace vspyct
