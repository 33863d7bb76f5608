#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <map>
#include <vector>

#include "vspyct/tree.hpp"

namespace vspyct {

/// Monte Carlo predictive distribution for one input. The variance splits
/// exactly into a functional part (mean of the per-sample gated variances)
/// and a routing part (sample variance of the per-sample gated means):
/// variance == functional_component + routing_component.
struct PredictiveDistribution {
  double mean = 0.0;
  double variance = 0.0;
  double functional_component = 0.0;
  double routing_component = 0.0;
  double mean_gate_weight = 0.0;
  std::map<int, int> leaf_histogram;  // leaf id -> times reached
};

/// Combines per-sample gated predictions. routing_component uses the
/// (M - 1) denominator and is 0 when only one sample is drawn.
PredictiveDistribution aggregate_samples(const std::vector<double>& means,
                                         const std::vector<double>& vars,
                                         const std::vector<double>& weights,
                                         const std::vector<int>& leaf_ids);

/// Draws mc_samples stochastic root-to-leaf routes and aggregates the gated
/// leaf predictions reached. The rng drives routing only; repeated leaves
/// within one call reuse a cached gated prediction.
PredictiveDistribution predict(const Tree& tree, const Eigen::VectorXd& x_raw,
                               int mc_samples, Rng& rng);

/// Same routing draws, but every leaf contributes its prototype and the
/// noise floor through the gate arithmetic with weight 0, matching what the
/// gated model produces when the gate saturates fully closed.
PredictiveDistribution predict_baseline(const Tree& tree,
                                        const Eigen::VectorXd& x_raw,
                                        int mc_samples, Rng& rng);

/// Per-row routing seed: row i of a batch uses an independent stream derived
/// from (seed, i), so batch results match a serial loop that seeds
/// Rng(row_stream_seed(seed, i)) per row, regardless of thread count.
std::uint64_t row_stream_seed(std::uint64_t seed, std::size_t row);

std::vector<PredictiveDistribution> predict_batch(const Tree& tree,
                                                  const Eigen::MatrixXd& x_raw,
                                                  int mc_samples,
                                                  std::uint64_t seed,
                                                  int threads = 0,
                                                  bool baseline = false);

}  // namespace vspyct
