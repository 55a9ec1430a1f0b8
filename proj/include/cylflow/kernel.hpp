#pragma once

// Fundamental solution of the Laplacian on R x T,
//   K(x1,x2) = (1/4pi) log(2 cosh(2 pi x1) - 2 cos(2 pi x2)),
// its gradient, the modified kernel Kbar = K - |x1|/2, and the L1 norms of
// d2K and d1Kbar that bound the oscillating velocity in terms of vorticity.

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "cylflow/spectral.hpp"

namespace cylflow {

namespace detail {
inline double wrap_unit(double x) { return x - std::floor(x); }
}  // namespace detail

inline double kernel_K(double x1, double x2) {
  const double theta = kTwoPi * detail::wrap_unit(x2);
  const double a = kTwoPi * std::abs(x1);
  if (std::abs(x1) > 10.0) {
    const double ea = std::exp(-a);
    return std::abs(x1) / 2.0 + std::log(1.0 - 2.0 * std::cos(theta) * ea + ea * ea) / (4.0 * std::numbers::pi);
  }
  const double arg = 2.0 * std::cosh(a) - 2.0 * std::cos(theta);
  if (!(arg > 0.0))
    throw std::domain_error("kernel_K: logarithmic singularity at (" + std::to_string(x1) + ", " +
                            std::to_string(x2) + ")");
  return std::log(arg) / (4.0 * std::numbers::pi);
}

struct KernelGradient {
  double d1 = 0.0;  // dK/dx1
  double d2 = 0.0;  // dK/dx2
};

// Written with q = 1 - 2 cos(theta) e^{-a} + e^{-2a} so that no cosh overflows:
//   dK/dx1 = sign(x1) (1 - e^{-2a}) / (2q),  dK/dx2 = sin(theta) e^{-a} / q.
inline KernelGradient kernel_gradient(double x1, double x2) {
  const double theta = kTwoPi * detail::wrap_unit(x2);
  const double a = kTwoPi * std::abs(x1);
  const double ea = std::exp(-a);
  const double q = 1.0 - 2.0 * std::cos(theta) * ea + ea * ea;
  if (!(q > 0.0)) throw std::domain_error("kernel_gradient: singular point");
  const double s = x1 > 0.0 ? 1.0 : (x1 < 0.0 ? -1.0 : 0.0);
  return {s * (1.0 - ea * ea) / (2.0 * q), std::sin(theta) * ea / q};
}

// d1 Kbar = dK/dx1 - sign(x1)/2 = sign(x1) e^{-a} (cos(theta) - e^{-a}) / q.
inline double kernel_bar_d1(double x1, double x2) {
  const double theta = kTwoPi * detail::wrap_unit(x2);
  const double a = kTwoPi * std::abs(x1);
  const double ea = std::exp(-a);
  const double q = 1.0 - 2.0 * std::cos(theta) * ea + ea * ea;
  if (!(q > 0.0)) throw std::domain_error("kernel_bar_d1: singular point");
  const double s = x1 > 0.0 ? 1.0 : (x1 < 0.0 ? -1.0 : 0.0);
  return s * ea * (std::cos(theta) - ea) / q;
}

struct QuadratureSpec {
  double X = 12.0;       // horizontal cutoff, integrands decay like e^{-2 pi |x1|}
  int panels_per_unit = 8;
  int corner_panels = 8;  // per direction inside the singular corner square

  [[nodiscard]] QuadratureSpec doubled() const { return {X, 2 * panels_per_unit, 2 * corner_panels}; }
  void validate() const {
    if (X < 10.0) throw std::invalid_argument("quadrature: cutoff X must be >= 10");
    if (panels_per_unit < 1 || corner_panels < 1)
      throw std::invalid_argument("quadrature: panel counts must be positive");
  }
};

struct KernelConstants {
  double norm_d2K = 0.0;     // ||d2 K||_{L1(R x T)}
  double norm_d1Kbar = 0.0;  // ||d1 Kbar||_{L1(R x T)}
  double C1 = 0.0;
  double C2 = 0.0;
  QuadratureSpec resolution;
  double refinement_change = 0.0;  // max relative change of the norms under doubling
  std::vector<std::string> derivation;
};

class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline constexpr int kGaussOrder = 10;

template <class F>
double gauss_panel(F&& f, double a, double b) {
  return boost::math::quadrature::gauss<double, kGaussOrder>::integrate(f, a, b);
}

// Tensor Gauss-Legendre over [a,b] x [c,d] with the given panel counts.
template <class F>
double tensor_gauss(F&& f, double a, double b, int na, double c, double d, int nc) {
  double total = 0.0;
  const double ha = (b - a) / na, hc = (d - c) / nc;
  for (int p = 0; p < na; ++p) {
    const double a0 = a + p * ha;
    total += gauss_panel(
        [&](double x) {
          double inner = 0.0;
          for (int r = 0; r < nc; ++r) {
            const double c0 = c + r * hc;
            inner += gauss_panel([&](double y) { return f(x, y); }, c0, c0 + hc);
          }
          return inner;
        },
        a0, a0 + ha);
  }
  return total;
}

// Integral of |g| over [-X,X] x [0,1) for g with |g(x1,x2)| symmetric in x1
// and in x2 -> 1 - x2, singular like 1/r at the origin only.
template <class G>
double symmetric_l1(G&& g, const QuadratureSpec& spec) {
  constexpr double rho = 0.25;
  auto ag = [&](double x1, double x2) { return std::abs(g(x1, x2)); };
  const int nc = spec.corner_panels;
  // Corner square [0,rho]^2 split along the diagonal; the Duffy map r = s,
  // second coordinate = s*v has Jacobian s, cancelling the 1/r singularity.
  const double lower = tensor_gauss([&](double s, double v) { return s * ag(s, s * v); }, 0.0, rho, nc, 0.0, 1.0, nc);
  const double upper = tensor_gauss([&](double s, double v) { return s * ag(s * v, s); }, 0.0, rho, nc, 0.0, 1.0, nc);
  const double strip = tensor_gauss(ag, 0.0, rho, nc, rho, 0.5, nc);
  const int nx = std::max(1, int(std::ceil((spec.X - rho) * spec.panels_per_unit)));
  const int ny = std::max(2, spec.panels_per_unit * 2);
  const double far = tensor_gauss(ag, rho, spec.X, nx, 0.0, 0.5, ny);
  return 4.0 * (lower + upper + strip + far);
}

}  // namespace detail

inline double l1_norm_d2K(const QuadratureSpec& spec) {
  return detail::symmetric_l1([](double x1, double x2) { return kernel_gradient(x1, x2).d2; }, spec);
}

inline double l1_norm_d1Kbar(const QuadratureSpec& spec) {
  return detail::symmetric_l1([](double x1, double x2) { return kernel_bar_d1(x1, x2); }, spec);
}

inline void assemble_velocity_constants(KernelConstants& k) {
  // |u1hat| <= ||d2K||_1 ||omega_hat||, |u2hat| <= ||d1Kbar||_1 ||omega_hat||,
  // ||omega_hat|| <= 2 ||omega||; p = -u1^2 - 2 d2K*(omega u1).
  k.C1 = 2.0 * std::max(k.norm_d2K, k.norm_d1Kbar);
  k.C2 = k.C1 * k.C1 + 2.0 * k.norm_d2K * k.C1;
  k.derivation = {
      "norm_d2K = ||d2 K||_L1(R x T) by composite Gauss-Legendre (Duffy corner), cutoff X",
      "norm_d1Kbar = ||d1 (K - |x1|/2)||_L1(R x T), same quadrature",
      "C1 = 2 * max(norm_d2K, norm_d1Kbar)   [Young: |u_hat_i| <= norm_i * ||omega_hat||, ||omega_hat|| <= 2||omega||]",
      "C2 = C1^2 + 2 * norm_d2K * C1         [||p|| <= ||u1||^2 + 2 norm_d2K ||omega|| ||u1||, ||u1|| <= C1 ||omega||]",
  };
}

// Largest relative change of the two norms under refinement; throws above 0.5%.
inline double require_converged(double a0, double a1, double b0, double b1) {
  const double ca = std::abs(a1 - a0) / std::abs(a1), cb = std::abs(b1 - b0) / std::abs(b1);
  const double change = std::max(ca, cb);
  if (!(ca < 5e-3 && cb < 5e-3))
    throw QuadratureError("kernel norms not converged: relative change " + std::to_string(change) +
                          " under panel doubling");
  return change;
}

inline KernelConstants compute_kernel_constants(const QuadratureSpec& spec) {
  spec.validate();
  const QuadratureSpec fine = spec.doubled();
  const double a0 = l1_norm_d2K(spec), a1 = l1_norm_d2K(fine);
  const double b0 = l1_norm_d1Kbar(spec), b1 = l1_norm_d1Kbar(fine);
  const double change = require_converged(a0, a1, b0, b1);
  KernelConstants k;
  k.norm_d2K = a1;
  k.norm_d1Kbar = b1;
  k.resolution = fine;
  k.refinement_change = change;
  assemble_velocity_constants(k);
  return k;
}

}  // namespace cylflow
