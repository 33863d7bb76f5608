#include "vspyct/synth.hpp"

#include <cmath>

#include "vspyct/common.hpp"

namespace vspyct {

Dataset make_linear3d_box(int n, double lo, double hi, std::uint64_t seed) {
  if (n < 1) throw InvalidInput("make_linear3d_box: n must be >= 1");
  if (!(lo < hi)) throw InvalidInput("make_linear3d_box: need lo < hi");
  Rng rng(seed);
  Dataset ds;
  ds.name = "linear3d";
  ds.feature_names = {"x1", "x2", "x3"};
  ds.features.resize(n, 3);
  ds.target.resize(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < 3; ++j) ds.features(i, j) = rng.uniform(lo, hi);
  for (int i = 0; i < n; ++i) {
    ds.target[i] = 2.0 * ds.features(i, 0) + 3.0 * ds.features(i, 1) +
                   ds.features(i, 2) + 0.1 * rng.normal();
  }
  return ds;
}

Dataset make_linear3d(int n, std::uint64_t seed) {
  return make_linear3d_box(n, 0.0, 1.0, seed);
}

Dataset make_energy_style(int n, std::uint64_t seed) {
  if (n < 1) throw InvalidInput("make_energy_style: n must be >= 1");
  Rng rng(seed);
  Dataset ds;
  ds.name = "energy_synth";
  ds.feature_names = {"compactness", "surface_area", "wall_area",
                      "roof_area",   "height",       "orientation",
                      "glazing_area", "glazing_dist"};
  ds.features.resize(n, 8);
  ds.target.resize(n);
  for (int i = 0; i < n; ++i) {
    ds.features(i, 0) = rng.uniform(0.62, 0.98);
    ds.features(i, 1) = rng.uniform(514.0, 808.0);
    ds.features(i, 2) = rng.uniform(245.0, 416.0);
    ds.features(i, 3) = rng.uniform(110.0, 220.0);
    ds.features(i, 4) = rng.uniform(3.5, 7.0);
    ds.features(i, 5) = rng.uniform(2.0, 5.0);
    ds.features(i, 6) = rng.uniform(0.0, 0.4);
    ds.features(i, 7) = rng.uniform(0.0, 5.0);
  }
  for (int i = 0; i < n; ++i) {
    const auto x = ds.features.row(i);
    ds.target[i] = 5.0 + 1.8 * (x[4] - 3.5) + 0.04 * (x[2] - 245.0) +
                   25.0 * x[6] + 8.0 * (0.98 - x[0]) + 0.3 * x[7] +
                   0.4 * std::sin(0.02 * x[1]) + rng.normal();
  }
  return ds;
}

Dataset make_oblique_ridge(int n, std::uint64_t seed) {
  if (n < 1) throw InvalidInput("make_oblique_ridge: n must be >= 1");
  Rng rng(seed);
  Dataset ds;
  ds.name = "oblique_ridge";
  ds.feature_names = {"x1", "x2"};
  ds.features.resize(n, 2);
  ds.target.resize(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < 2; ++j) ds.features(i, j) = rng.uniform(-2.0, 2.0);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < n; ++i) {
    const double u = (ds.features(i, 0) + ds.features(i, 1)) * inv_sqrt2;
    const double v = ds.features(i, 0) - ds.features(i, 1);
    ds.target[i] = 3.0 * std::tanh(2.0 * u) + 0.5 * std::sin(3.0 * v) +
                   0.1 * rng.normal();
  }
  return ds;
}

}  // namespace vspyct
