#pragma once

#include <Eigen/Core>
#include <vector>

#include "vspyct/config.hpp"
#include "vspyct/dataset.hpp"
#include "vspyct/gating.hpp"

namespace vspyct {

/// Diagonal Gaussian variational posterior over oblique split parameters
/// (w, b) in standardized-feature units.
struct SplitPosterior {
  Eigen::VectorXd w_mean;
  Eigen::VectorXd w_log_std;
  double b_mean = 0.0;
  double b_log_std = 0.0;
};

/// One concrete draw of split parameters.
struct SplitParams {
  Eigen::VectorXd w;
  double b = 0.0;
};

/// Internal node (posterior + children) or reference into the leaf arena.
struct TreeNode {
  bool is_leaf = false;
  SplitPosterior posterior;  // internal nodes only
  int left = -1;
  int right = -1;
  int leaf_id = -1;  // leaves only
};

struct TargetStats {
  double y_max = 0.0;
  double y_mean = 0.0;
};

/// Fitted model: node arena (root at index 0), leaf arena, feature
/// standardizer, and the training-target stats. Immutable after fitting and
/// safe to share across concurrent readers.
struct Tree {
  std::vector<TreeNode> nodes;
  std::vector<Leaf> leaves;
  TreeConfig config;
  Standardizer standardizer;
  TargetStats target_stats;
  std::vector<std::string> feature_names;

  int root = 0;
  int num_features() const { return standardizer.dim(); }
  int depth() const;          // longest root-to-leaf path in edges
  int leaves_with_gp() const;
};

/// Grows the tree greedily (depth-first), fits leaf support regions and GP
/// models, and calibrates tau when the config asks for auto mode.
Tree fit_tree(const Dataset& dataset, const TreeConfig& config);

/// Trains the variational split posterior on a node's standardized subset:
/// reparameterized one-sample ELBO with a soft-membership target-variance
/// impurity likelihood and a KL pull toward a standard-normal prior scaled
/// by 1/n, minimized with Adam.
SplitPosterior fit_split(const Eigen::MatrixXd& x_std, const Eigen::VectorXd& y,
                         const TreeConfig& config, Rng& rng);

/// Draws w ~ N(w_mean, diag(exp(2 w_log_std))), b ~ N(b_mean, exp(2 b_log_std)).
SplitParams sample_split(const SplitPosterior& posterior, Rng& rng);

/// Stochastic routing: at each internal node draws split parameters and goes
/// left iff sigmoid(w.x + b) <= 0.5. Returns the reached leaf's id.
int route(const Tree& tree, const Eigen::VectorXd& x_raw, Rng& rng);
int route_standardized(const Tree& tree, const Eigen::VectorXd& x_std, Rng& rng);

/// Deterministic routing at the posterior means (used for fit-time
/// partitioning and for partition checks).
int route_mean(const Tree& tree, const Eigen::VectorXd& x_raw);
int route_mean_standardized(const Tree& tree, const Eigen::VectorXd& x_std);

/// Copy of the tree with every leaf's tau replaced (structure and GP models
/// shared by value). Fitting never depends on tau, so this is equivalent to
/// refitting with a fixed-tau config.
Tree with_tau(const Tree& tree, double tau);

}  // namespace vspyct
