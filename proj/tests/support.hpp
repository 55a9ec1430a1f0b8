#pragma once

// Shared generators and helpers for the property tests.

#include <cmath>
#include <random>
#include <vector>

#include "cylflow/cylflow.hpp"

namespace testing_support {

using namespace cylflow;

// Deterministic generator: every property test draws from a fixed seed so a
// failing case can be replayed.
struct Gen {
  std::mt19937_64 rng;
  explicit Gen(std::uint64_t seed) : rng(seed) {}

  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }
  int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(rng); }

  Grid grid() {
    const int n1 = 8 * integer(1, 6), n2 = 8 * integer(1, 4);
    return {uniform(2.0, 20.0), n1, n2};
  }

  RealField field(const Grid& g) {
    RealField f(g);
    for (double& v : f.values) v = normal();
    return f;
  }

  // Band-limited vorticity with zero circulation, supported below a third of
  // each grid dimension (products alias-free on the grid).
  FlowState band_limited(const Grid& g, double amplitude = 1.0, double m0 = 0.0) {
    RandomBandLimited spec;
    spec.amplitude = amplitude;
    spec.k1_max = std::max(1, std::min(integer(1, 5), g.n1 / 6 - 1));
    spec.k2_max = std::max(1, std::min(integer(1, 4), g.n2 / 6 - 1));
    spec.m0 = m0;
    spec.seed = rng();
    return random_band_limited(g, spec);
  }
};

inline double max_abs_diff(const RealField& a, const RealField& b) {
  double m = 0.0;
  for (std::size_t n = 0; n < a.values.size(); ++n) m = std::max(m, std::abs(a.values[n] - b.values[n]));
  return m;
}

inline double max_abs_diff(const Profile& a, const Profile& b) {
  double m = 0.0;
  for (std::size_t n = 0; n < a.values.size(); ++n) m = std::max(m, std::abs(a.values[n] - b.values[n]));
  return m;
}

inline double max_abs(const SpectralField& f) {
  double m = 0.0;
  for (const auto& c : f.coeffs) m = std::max(m, std::abs(c));
  return m;
}

inline RealField spectral_div(const VelocityField& u) {
  return derivative(u.u1, Axis::horizontal) + derivative(u.u2, Axis::vertical);
}

// div((u.grad)u) - Lap(u1^2) - 2 d2(omega u1), all spectral; exact on the
// samples for states band-limited below a sixth of the grid.
inline RealField uid_residual(const VelocityField& u, const RealField& w) {
  const RealField a1 = u.u1 * derivative(u.u1, Axis::horizontal) + u.u2 * derivative(u.u1, Axis::vertical);
  const RealField a2 = u.u1 * derivative(u.u2, Axis::horizontal) + u.u2 * derivative(u.u2, Axis::vertical);
  const RealField div = derivative(a1, Axis::horizontal) + derivative(a2, Axis::vertical);
  const RealField lap = inverse_transform(laplacian(transform(u.u1 * u.u1)));
  return div - lap - 2.0 * derivative(w * u.u1, Axis::vertical);
}

// Sample the ledger of a run through the diagnostics pipeline.
inline LedgerData ledger_of(const SimConfig& cfg, const FlowState& initial, std::vector<Window> windows = {}) {
  EnergyLedger ledger(cfg.grid, std::move(windows));
  run(cfg, initial, [&](const StepView& v) {
    ledger.accumulate(diagnose(v.omega_hat, v.state.m0, v.state.t, &v.state.omega).profiles, v.omega_sup);
  });
  return ledger.data();
}

}  // namespace testing_support
