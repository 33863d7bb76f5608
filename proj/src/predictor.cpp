#include "vspyct/predictor.hpp"

#include <cmath>

namespace vspyct {

PredictiveDistribution aggregate_samples(const std::vector<double>& means,
                                         const std::vector<double>& vars,
                                         const std::vector<double>& weights,
                                         const std::vector<int>& leaf_ids) {
  const std::size_t m = means.size();
  if (m == 0) throw InvalidInput("aggregate_samples: no samples");
  if (vars.size() != m || weights.size() != m || leaf_ids.size() != m)
    throw InvalidInput("aggregate_samples: sample vectors disagree in length");

  PredictiveDistribution out;
  double sum_mean = 0.0;
  double sum_var = 0.0;
  double sum_weight = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sum_mean += means[i];
    sum_var += vars[i];
    sum_weight += weights[i];
    out.leaf_histogram[leaf_ids[i]] += 1;
  }
  const double inv_m = 1.0 / static_cast<double>(m);
  out.mean = sum_mean * inv_m;
  out.functional_component = sum_var * inv_m;
  out.mean_gate_weight = sum_weight * inv_m;

  if (m > 1) {
    double ss = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double d = means[i] - out.mean;
      ss += d * d;
    }
    out.routing_component = ss / static_cast<double>(m - 1);
  } else {
    out.routing_component = 0.0;
  }
  // The total is defined as this sum, so the decomposition identity holds
  // exactly in floating point, not just in expectation.
  out.variance = out.functional_component + out.routing_component;
  return out;
}

namespace {

GatedPrediction closed_gate_predict(const Leaf& leaf) {
  // Mirrors the gated blend with weight 0 and zero GP contributions. Written
  // as the full expression so a saturated gate in the live model produces
  // bit-identical numbers.
  GatedPrediction out;
  out.weight = 0.0;
  out.mean = (1.0 - out.weight) * leaf.prototype + out.weight * 0.0;
  out.var = (1.0 - out.weight) * leaf.noise_floor + out.weight * 0.0;
  return out;
}

PredictiveDistribution predict_impl(const Tree& tree,
                                    const Eigen::VectorXd& x_raw,
                                    int mc_samples, Rng& rng, bool baseline) {
  if (mc_samples < 1)
    throw InvalidInput("predict: mc_samples must be at least 1");
  const Eigen::VectorXd x_std = tree.standardizer.apply(x_raw);

  std::vector<GatedPrediction> cache(tree.leaves.size());
  std::vector<char> cached(tree.leaves.size(), 0);
  std::vector<double> means, vars, weights;
  std::vector<int> leaf_ids;
  means.reserve(mc_samples);
  vars.reserve(mc_samples);
  weights.reserve(mc_samples);
  leaf_ids.reserve(mc_samples);

  for (int s = 0; s < mc_samples; ++s) {
    const int leaf_id = route_standardized(tree, x_std, rng);
    if (!cached[leaf_id]) {
      const Leaf& leaf = tree.leaves[leaf_id];
      cache[leaf_id] =
          baseline ? closed_gate_predict(leaf) : gated_predict(leaf, x_std);
      cached[leaf_id] = 1;
    }
    const GatedPrediction& g = cache[leaf_id];
    means.push_back(g.mean);
    vars.push_back(g.var);
    weights.push_back(g.weight);
    leaf_ids.push_back(leaf_id);
  }
  return aggregate_samples(means, vars, weights, leaf_ids);
}

}  // namespace

PredictiveDistribution predict(const Tree& tree, const Eigen::VectorXd& x_raw,
                               int mc_samples, Rng& rng) {
  return predict_impl(tree, x_raw, mc_samples, rng, false);
}

PredictiveDistribution predict_baseline(const Tree& tree,
                                        const Eigen::VectorXd& x_raw,
                                        int mc_samples, Rng& rng) {
  return predict_impl(tree, x_raw, mc_samples, rng, true);
}

std::uint64_t row_stream_seed(std::uint64_t seed, std::size_t row) {
  return mix_seed(seed, static_cast<std::uint64_t>(row));
}

std::vector<PredictiveDistribution> predict_batch(const Tree& tree,
                                                  const Eigen::MatrixXd& x_raw,
                                                  int mc_samples,
                                                  std::uint64_t seed,
                                                  int threads, bool baseline) {
  if (x_raw.cols() != tree.num_features())
    throw InvalidInput("predict_batch: feature dimension mismatch");
  const std::size_t n = static_cast<std::size_t>(x_raw.rows());
  std::vector<PredictiveDistribution> out(n);
  parallel_for(n, resolve_threads(threads), [&](std::size_t i) {
    Rng rng(row_stream_seed(seed, i));
    out[i] = predict_impl(tree, x_raw.row(static_cast<Eigen::Index>(i)).transpose(),
                          mc_samples, rng, baseline);
  });
  return out;
}

}  // namespace vspyct
