#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "tdirac/algebra.hpp"
#include "tdirac/metric.hpp"
#include "tdirac/multivector.hpp"

namespace tdirac {

// FNV-1a; used to derive stable per-check seeds from names.
constexpr std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return h;
}

// Portable random source: std::mt19937_64 (its output sequence is fixed by the
// standard) mapped to doubles by hand, since the std distributions are
// implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}
  Rng(std::uint64_t seed, std::string_view tag) : Rng(seed ^ fnv1a(tag)) {}

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int index(int n) { return static_cast<int>(engine_() % static_cast<std::uint64_t>(n)); }
  std::uint64_t next() { return engine_(); }

  // Child generator for a named sub-task; independent of draws made so far.
  Rng fork(std::string_view tag) const { return Rng(seed_, tag); }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

inline Multivectord random_multivector(Rng& rng, double amplitude = 1.0) {
  Multivectord out;
  for (int i = 0; i < kBladeCount; ++i) out[i] = rng.uniform(-amplitude, amplitude);
  return out;
}

inline Multivectord random_homogeneous(Rng& rng, int k, double amplitude = 1.0) {
  Multivectord out;
  for (int i = grade_begin(k); i < grade_end(k); ++i) out[i] = rng.uniform(-amplitude, amplitude);
  return out;
}

inline Multivectord random_even(Rng& rng, double amplitude = 1.0) {
  return random_homogeneous(rng, 0, amplitude) + random_homogeneous(rng, 2, amplitude) +
         random_homogeneous(rng, 4, amplitude);
}

// Minkowski plus a symmetric perturbation; redrawn until the axioms hold.
inline MetricAtPointd random_metric(Rng& rng, double spread = 0.3) {
  for (;;) {
    Eigen::Matrix4d a = Eigen::Vector4d(1, -1, -1, -1).asDiagonal().toDenseMatrix();
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) a(i, j) += spread * rng.uniform(-1.0, 1.0);
    try {
      return MetricAtPointd(0.5 * (a + a.transpose()));
    } catch (const MetricAxiomViolation&) {
    }
  }
}

// exp of a random 2-form: a Spin element.
inline Multivectord random_spin(Rng& rng, const MetricAtPointd& m, double amplitude = 0.8) {
  return exp_series(random_homogeneous(rng, 2, amplitude), m);
}

}  // namespace tdirac
