#pragma once

#include <cstdint>

#include "vspyct/dataset.hpp"

namespace vspyct {

/// y = 2 x1 + 3 x2 + x3 + N(0, 0.1^2), inputs uniform in [lo, hi]^3.
/// Feature draws fill the matrix row by row before any target noise is
/// drawn, so the design depends only on (n, lo, hi, seed).
Dataset make_linear3d_box(int n, double lo, double hi, std::uint64_t seed);

/// Training box [0, 1]^3 of the linear law above.
Dataset make_linear3d(int n, std::uint64_t seed);

/// Tabular regression set shaped like a building-energy study: 8 features on
/// very different scales, a smooth mostly-additive response in roughly
/// [2, 35] with a mild sinusoidal term, and unit-variance noise.
Dataset make_energy_style(int n, std::uint64_t seed);

/// Two features, response dominated by a steep tanh ridge along x1 + x2 with
/// a small transverse sine. Axis-aligned cuts approximate it poorly, so it
/// exercises oblique splits.
Dataset make_oblique_ridge(int n, std::uint64_t seed);

}  // namespace vspyct
