#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace vspyct {

/// Bad user input: malformed data, impossible configuration, dimension
/// mismatches. The CLI maps this to exit code 2.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Unrecoverable numerical failure (e.g. Cholesky factorization that keeps
/// failing after jitter escalation). The CLI maps this to exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerically stable logistic sigmoid. Exact 0 / 1 in the saturated tails,
/// which the gate-collapse behaviour at huge thresholds relies on.
inline double sigmoid(double z) {
  if (z >= 0.0) {
    const double e = std::exp(-z);
    return 1.0 / (1.0 + e);
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

/// Empirical percentile with linear interpolation between closest ranks
/// (inclusive method): rank h = p * (n - 1), interpolate between floor(h)
/// and floor(h)+1. `p` in [0, 1]. Sorts a copy of `values`.
double percentile(std::vector<double> values, double p);

/// Population variance (denominator n). Returns 0 for n <= 1.
double population_variance(const std::vector<double>& values);

uint64_t splitmix64(uint64_t x);

/// Counter-based derivation of independent seeds from a base seed, so that
/// per-row / per-leaf streams do not depend on evaluation order.
uint64_t mix_seed(uint64_t seed, uint64_t stream);

/// Deterministic random source. normal() consumes exactly two engine draws
/// (Box-Muller), so streams are reproducible across platforms and never
/// carry hidden distribution state between calls.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * kInv53;
  }

  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal draw via Box-Muller.
  double normal() {
    const double u1 = (static_cast<double>(engine_() >> 11) + 1.0) * kInv53;  // (0, 1]
    const double u2 = static_cast<double>(engine_() >> 11) * kInv53;          // [0, 1)
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }

  uint64_t next_u64() { return engine_(); }

 private:
  static constexpr double kInv53 = 1.0 / 9007199254740992.0;  // 2^-53
  static constexpr double kPi = 3.141592653589793238462643383279502884;
  std::mt19937_64 engine_;
};

/// Number of worker threads: `requested` if positive, otherwise all
/// available hardware threads (at least 1).
int resolve_threads(int requested);

/// Runs body(i) for i in [0, n). With more than one worker the iterations
/// are claimed dynamically; each index must only write its own outputs, so
/// results are independent of scheduling. Exceptions from workers are
/// rethrown on the calling thread.
void parallel_for(std::size_t n, int threads,
                  const std::function<void(std::size_t)>& body);

/// Shortest round-trip decimal representation of a double (for CSV output).
std::string format_double(double value);

}  // namespace vspyct
