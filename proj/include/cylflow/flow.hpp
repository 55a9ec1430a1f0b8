#pragma once

// Flow state and the reconstruction of velocity and pressure from vorticity.
//
// The velocity splits as u = (0, m(x1)) + u_hat with u_hat = grad^perp psi,
// Laplacian(psi) = omega_hat on the oscillating modes (k2 != 0). The mean
// vertical flow satisfies d1 m = <omega>; its horizontal mean m0 is not fixed
// by the vorticity and is carried in the state.

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include "cylflow/kernel.hpp"
#include "cylflow/report.hpp"
#include "cylflow/spectral.hpp"

namespace cylflow {

struct FlowState {
  RealField omega;
  double m0 = 0.0;
  double t = 0.0;
};

class CirculationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline double circulation_tolerance(double scale) { return 1e-10 * std::max(1.0, scale); }

inline void require_zero_circulation(const SpectralField& omega_hat) {
  double scale = 0.0;
  for (const Complex& c : omega_hat.coeffs) {
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) throw std::invalid_argument("vorticity is not finite");
    scale = std::max(scale, std::abs(c));
  }
  const double mean = std::abs(omega_hat(0, 0));
  if (mean > circulation_tolerance(scale))
    throw CirculationError("vorticity has nonzero total circulation (mean " + std::to_string(mean) +
                           "); the mean vertical flow would not be periodic");
}

struct VelocitySpectra {
  SpectralField u1;
  SpectralField u2;
};

// Spectral Biot-Savart. Nyquist modes of omega carry no real derivative and are
// ignored, so fields with Nyquist content do not round-trip through curl.
inline VelocitySpectra velocity_spectra(const SpectralField& omega_hat, double m0) {
  require_zero_circulation(omega_hat);
  const Grid& g = omega_hat.grid;
  VelocitySpectra v{SpectralField(g), SpectralField(g)};
  for (int i = 0; i < g.n1; ++i) {
    const bool nyq1 = (i == g.n1 / 2);
    const double kx = nyq1 ? 0.0 : g.k1(i);
    for (int j = 1; j < g.n2_half(); ++j) {
      if (j == g.n2 / 2 || nyq1) continue;
      const double ky = g.k2(j);
      const Complex psi = -omega_hat(i, j) / (kx * kx + ky * ky);
      v.u1(i, j) = -Complex(0.0, ky) * psi;
      v.u2(i, j) = Complex(0.0, kx) * psi;
    }
    if (i != 0 && !nyq1) v.u2(i, 0) = omega_hat(i, 0) / Complex(0.0, kx);
  }
  v.u2(0, 0) = m0;
  return v;
}

struct VelocityField {
  RealField u1;
  RealField u2;
  Profile m;         // <u2>(x1)
  RealField uhat1;   // equal to u1, since <u1> = 0
  RealField uhat2;   // u2 - m
};

inline VelocityField velocity_from_spectra(const VelocitySpectra& v) {
  VelocityField out;
  out.u1 = inverse_transform(v.u1);
  out.u2 = inverse_transform(v.u2);
  out.m = vertical_mean(out.u2);
  out.uhat1 = out.u1;
  out.uhat2 = out.u2;
  for (int i = 0; i < out.u2.grid.n1; ++i)
    for (int j = 0; j < out.u2.grid.n2; ++j) out.uhat2(i, j) -= out.m[std::size_t(i)];
  return out;
}

inline VelocityField reconstruct_velocity(const FlowState& state) {
  if (!state.omega.all_finite()) throw std::invalid_argument("reconstruct_velocity: non-finite vorticity");
  return velocity_from_spectra(velocity_spectra(transform(state.omega), state.m0));
}

// Curl of a spectral velocity: d1 u2 - d2 u1.
inline SpectralField curl(const VelocitySpectra& v) {
  return derivative(v.u2, Axis::horizontal) - derivative(v.u1, Axis::vertical);
}

// p = -u1^2 - 2 d2 Lap^{-1}(omega u1); the k2 = 0 row of omega u1 is
// annihilated by d2. Values are exact at the samples when omega is
// band-limited below a quarter of the grid (no aliasing of the product).
inline RealField pressure_field(const VelocityField& u, const RealField& omega) {
  require_same_grid(u.u1.grid, omega.grid, "pressure_field");
  const RealField wu = omega * u.u1;
  const RealField conv = inverse_transform(derivative(invert_laplacian_oscillating(transform(wu)), Axis::vertical));
  RealField p(omega.grid);
  for (std::size_t n = 0; n < p.values.size(); ++n) p.values[n] = -u.u1.values[n] * u.u1.values[n] - 2.0 * conv.values[n];
  return p;
}

// Young's-inequality bounds for the oscillating velocity and the pressure.
// ||u_hat|| is taken componentwise (max of the two component sup norms).
inline std::array<BoundReport, 2> check_velocity_bounds(const VelocityField& u, const RealField& omega, double M,
                                                        const KernelConstants& k) {
  const double wmax = omega.max_abs();
  if (wmax > M * (1.0 + 1e-9) + 1e-12)
    throw std::invalid_argument("check_velocity_bounds: ||omega|| exceeds M");
  const double uhat = std::max(u.uhat1.max_abs(), u.uhat2.max_abs());
  const double pmax = pressure_field(u, omega).max_abs();
  auto r1 = make_report("velocity_bound", uhat, k.C1 * wmax);
  auto r2 = make_report("pressure_bound", pmax, k.C2 * wmax * wmax);
  for (auto* r : {&r1, &r2}) {
    r->constants = {{"C1", k.C1}, {"C2", k.C2}, {"omega_sup", wmax}, {"M", M}};
  }
  return {r1, r2};
}

}  // namespace cylflow
