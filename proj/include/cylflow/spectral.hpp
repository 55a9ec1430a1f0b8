#pragma once

// Grid, real/spectral containers and the Fourier machinery on the periodic
// cylinder [0,L) x [0,1). Storage is row-major with the horizontal index i
// outermost: value (i,j) sits at (x1,x2) = (i*L/N1, j/N2).
//
// Spectral fields use the FFTW half-complex layout: N1 x (N2/2+1) complex
// coefficients, the conjugate half implied by Hermitian symmetry. The forward
// transform divides by N1*N2, so coefficient (0,0) is the field mean and the
// k2 = 0 row holds the vertical average.

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cylflow {

using Complex = std::complex<double>;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

enum class Axis { horizontal, vertical };

struct Grid {
  double L = 8.0;
  int n1 = 64;
  int n2 = 32;

  void validate() const {
    if (!(L > 0.0) || !std::isfinite(L))
      throw std::invalid_argument("grid: period L must be positive");
    if (n1 < 8 || n2 < 8 || n1 % 2 != 0 || n2 % 2 != 0)
      throw std::invalid_argument("grid: N1, N2 must be even and >= 8 (got " +
                                  std::to_string(n1) + "x" + std::to_string(n2) + ")");
  }

  [[nodiscard]] std::size_t size() const { return std::size_t(n1) * std::size_t(n2); }
  [[nodiscard]] int n2_half() const { return n2 / 2 + 1; }
  [[nodiscard]] std::size_t spectral_size() const { return std::size_t(n1) * std::size_t(n2_half()); }
  [[nodiscard]] double dx1() const { return L / n1; }
  [[nodiscard]] double dx2() const { return 1.0 / n2; }
  [[nodiscard]] double x1(int i) const { return i * dx1(); }
  [[nodiscard]] double x2(int j) const { return j * dx2(); }

  // Signed horizontal mode number for storage row i, in (-N1/2, N1/2].
  [[nodiscard]] int k1_index(int i) const { return i <= n1 / 2 ? i : i - n1; }
  [[nodiscard]] double k1(int i) const { return kTwoPi * k1_index(i) / L; }
  [[nodiscard]] double k2(int j) const { return kTwoPi * j; }

  friend bool operator==(const Grid&, const Grid&) = default;
};

inline void require_same_grid(const Grid& a, const Grid& b, const char* what) {
  if (!(a == b)) throw std::invalid_argument(std::string(what) + ": grid mismatch");
}

struct RealField {
  Grid grid;
  std::vector<double> values;

  RealField() = default;
  explicit RealField(const Grid& g) : grid(g), values(g.size(), 0.0) {}
  RealField(const Grid& g, std::vector<double> v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.size())
      throw std::invalid_argument("RealField: " + std::to_string(values.size()) +
                                  " samples for a " + std::to_string(grid.n1) + "x" +
                                  std::to_string(grid.n2) + " grid");
  }

  template <class F>
  static RealField sample(const Grid& g, F&& fn) {
    RealField out(g);
    for (int i = 0; i < g.n1; ++i)
      for (int j = 0; j < g.n2; ++j) out(i, j) = fn(g.x1(i), g.x2(j));
    return out;
  }

  double& operator()(int i, int j) { return values[std::size_t(i) * grid.n2 + j]; }
  double operator()(int i, int j) const { return values[std::size_t(i) * grid.n2 + j]; }

  [[nodiscard]] double max_abs() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
  }
  [[nodiscard]] double mean() const {
    double s = 0.0;
    for (double v : values) s += v;
    return s / double(values.size());
  }
  [[nodiscard]] bool all_finite() const {
    return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
  }
};

struct SpectralField {
  Grid grid;
  std::vector<Complex> coeffs;

  SpectralField() = default;
  explicit SpectralField(const Grid& g) : grid(g), coeffs(g.spectral_size(), Complex{}) {}

  Complex& operator()(int i, int j) { return coeffs[std::size_t(i) * grid.n2_half() + j]; }
  const Complex& operator()(int i, int j) const { return coeffs[std::size_t(i) * grid.n2_half() + j]; }
};

// Horizontal profile: one value per x1 sample.
struct Profile {
  Grid grid;
  std::vector<double> values;

  Profile() = default;
  explicit Profile(const Grid& g, double fill = 0.0) : grid(g), values(std::size_t(g.n1), fill) {}

  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
  [[nodiscard]] std::size_t size() const { return values.size(); }
  [[nodiscard]] double max() const { return *std::max_element(values.begin(), values.end()); }
  [[nodiscard]] double min() const { return *std::min_element(values.begin(), values.end()); }
};

// --- elementwise helpers -------------------------------------------------

inline RealField operator+(RealField a, const RealField& b) {
  require_same_grid(a.grid, b.grid, "operator+");
  for (std::size_t n = 0; n < a.values.size(); ++n) a.values[n] += b.values[n];
  return a;
}
inline RealField operator-(RealField a, const RealField& b) {
  require_same_grid(a.grid, b.grid, "operator-");
  for (std::size_t n = 0; n < a.values.size(); ++n) a.values[n] -= b.values[n];
  return a;
}
inline RealField operator*(RealField a, const RealField& b) {
  require_same_grid(a.grid, b.grid, "operator*");
  for (std::size_t n = 0; n < a.values.size(); ++n) a.values[n] *= b.values[n];
  return a;
}
inline RealField operator*(double s, RealField a) {
  for (double& v : a.values) v *= s;
  return a;
}

inline SpectralField operator+(SpectralField a, const SpectralField& b) {
  require_same_grid(a.grid, b.grid, "operator+");
  for (std::size_t n = 0; n < a.coeffs.size(); ++n) a.coeffs[n] += b.coeffs[n];
  return a;
}
inline SpectralField operator-(SpectralField a, const SpectralField& b) {
  require_same_grid(a.grid, b.grid, "operator-");
  for (std::size_t n = 0; n < a.coeffs.size(); ++n) a.coeffs[n] -= b.coeffs[n];
  return a;
}
inline SpectralField operator*(double s, SpectralField a) {
  for (Complex& c : a.coeffs) c *= s;
  return a;
}

// Vertical average <g>(x1), computed as the plain mean over x2 samples.
inline Profile vertical_mean(const RealField& f) {
  Profile p(f.grid);
  for (int i = 0; i < f.grid.n1; ++i) {
    double s = 0.0;
    for (int j = 0; j < f.grid.n2; ++j) s += f(i, j);
    p[std::size_t(i)] = s / f.grid.n2;
  }
  return p;
}

// --- FFTW plans -------------------------------------------------------------

namespace detail {

// FFTW's planner is not thread-safe; plans are created once per shape under a
// lock and then executed through the new-array interface, which is.
class PlanCache {
 public:
  struct Plans2d {
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;
  };
  struct Plans1d {
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;
  };

  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  Plans2d plans2d(int n1, int n2) {
    std::lock_guard lock(mutex_);
    auto it = plans2d_.find({n1, n2});
    if (it != plans2d_.end()) return it->second;
    std::vector<double> real(std::size_t(n1) * n2);
    std::vector<Complex> spec(std::size_t(n1) * (n2 / 2 + 1));
    auto* cspec = reinterpret_cast<fftw_complex*>(spec.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    Plans2d p{fftw_plan_dft_r2c_2d(n1, n2, real.data(), cspec, flags),
              fftw_plan_dft_c2r_2d(n1, n2, cspec, real.data(), flags)};
    plans2d_.emplace(std::pair{n1, n2}, p);
    return p;
  }

  Plans1d plans1d(int n) {
    std::lock_guard lock(mutex_);
    auto it = plans1d_.find(n);
    if (it != plans1d_.end()) return it->second;
    std::vector<double> real(static_cast<std::size_t>(n));
    std::vector<Complex> spec(static_cast<std::size_t>(n / 2 + 1));
    auto* cspec = reinterpret_cast<fftw_complex*>(spec.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    Plans1d p{fftw_plan_dft_r2c_1d(n, real.data(), cspec, flags),
              fftw_plan_dft_c2r_1d(n, cspec, real.data(), flags)};
    plans1d_.emplace(n, p);
    return p;
  }

  PlanCache(const PlanCache&) = delete;
  PlanCache& operator=(const PlanCache&) = delete;

 private:
  PlanCache() = default;
  ~PlanCache() {
    for (auto& [k, p] : plans2d_) {
      fftw_destroy_plan(p.forward);
      fftw_destroy_plan(p.backward);
    }
    for (auto& [k, p] : plans1d_) {
      fftw_destroy_plan(p.forward);
      fftw_destroy_plan(p.backward);
    }
  }

  std::mutex mutex_;
  std::map<std::pair<int, int>, Plans2d> plans2d_;
  std::map<int, Plans1d> plans1d_;
};

}  // namespace detail

// --- transforms -------------------------------------------------------------

inline SpectralField transform(const RealField& field) {
  const Grid& g = field.grid;
  g.validate();
  if (field.values.size() != g.size()) throw std::invalid_argument("transform: dimension mismatch");
  auto plans = detail::PlanCache::instance().plans2d(g.n1, g.n2);
  std::vector<double> in = field.values;
  SpectralField out(g);
  fftw_execute_dft_r2c(plans.forward, in.data(), reinterpret_cast<fftw_complex*>(out.coeffs.data()));
  const double scale = 1.0 / double(g.size());
  for (Complex& c : out.coeffs) c *= scale;
  return out;
}

inline RealField inverse_transform(const SpectralField& field) {
  const Grid& g = field.grid;
  g.validate();
  if (field.coeffs.size() != g.spectral_size())
    throw std::invalid_argument("inverse_transform: dimension mismatch");
  auto plans = detail::PlanCache::instance().plans2d(g.n1, g.n2);
  std::vector<Complex> in = field.coeffs;  // c2r destroys its input
  RealField out(g);
  fftw_execute_dft_c2r(plans.backward, reinterpret_cast<fftw_complex*>(in.data()), out.values.data());
  return out;
}

// 1D transform of a horizontal profile: N1/2+1 coefficients, normalized by N1.
inline std::vector<Complex> transform(const Profile& p) {
  const int n = p.grid.n1;
  auto plans = detail::PlanCache::instance().plans1d(n);
  std::vector<double> in = p.values;
  std::vector<Complex> out(static_cast<std::size_t>(n / 2 + 1));
  fftw_execute_dft_r2c(plans.forward, in.data(), reinterpret_cast<fftw_complex*>(out.data()));
  for (Complex& c : out) c /= double(n);
  return out;
}

inline Profile inverse_transform(const Grid& g, std::span<const Complex> coeffs) {
  const int n = g.n1;
  if (coeffs.size() != std::size_t(n / 2 + 1)) throw std::invalid_argument("profile inverse: size mismatch");
  auto plans = detail::PlanCache::instance().plans1d(n);
  std::vector<Complex> in(coeffs.begin(), coeffs.end());
  Profile out(g);
  fftw_execute_dft_c2r(plans.backward, reinterpret_cast<fftw_complex*>(in.data()), out.values.data());
  return out;
}

// Sum of |c|^2 over the full (Hermitian-completed) lattice. With the forward
// normalization above, this equals the grid mean of f^2 (Parseval).
inline double spectral_energy(const SpectralField& f) {
  const Grid& g = f.grid;
  double s = 0.0;
  for (int i = 0; i < g.n1; ++i)
    for (int j = 0; j < g.n2_half(); ++j) {
      const double w = (j == 0 || j == g.n2 / 2) ? 1.0 : 2.0;
      s += w * std::norm(f(i, j));
    }
  return s;
}

// --- spectral operators -----------------------------------------------------

// Multiplies each mode by i*k along `axis`. The unpaired Nyquist mode of that
// axis has no real derivative and is mapped to zero.
inline SpectralField derivative(const SpectralField& f, Axis axis) {
  const Grid& g = f.grid;
  SpectralField out(g);
  for (int i = 0; i < g.n1; ++i)
    for (int j = 0; j < g.n2_half(); ++j) {
      double k = 0.0;
      if (axis == Axis::horizontal) {
        k = (i == g.n1 / 2) ? 0.0 : g.k1(i);
      } else {
        k = (j == g.n2 / 2) ? 0.0 : g.k2(j);
      }
      out(i, j) = Complex(0.0, k) * f(i, j);
    }
  return out;
}

inline bool dealias_keeps(const Grid& g, int i, int j) {
  // 2/3 rule: keep |k1| <= N1/3 and |k2| <= N2/3.
  return 3 * std::abs(g.k1_index(i)) <= g.n1 && 3 * j <= g.n2;
}

inline SpectralField dealias(SpectralField f) {
  const Grid& g = f.grid;
  for (int i = 0; i < g.n1; ++i)
    for (int j = 0; j < g.n2_half(); ++j)
      if (!dealias_keeps(g, i, j)) f(i, j) = Complex{};
  return f;
}

// Zero coefficients below rel * max |coefficient|. Decayed modes otherwise
// end up subnormal, and subnormal arithmetic is slow.
inline void flush_negligible(SpectralField& f, double rel = 1e-30) {
  double m = 0.0;
  for (const Complex& c : f.coeffs) m = std::max(m, std::abs(c.real()) + std::abs(c.imag()));
  const double cut = rel * m;
  for (Complex& c : f.coeffs)
    if (std::abs(c.real()) + std::abs(c.imag()) < cut) c = Complex{};
}

// Mode-wise inverse Laplacian on the oscillating subspace: modes with k2 != 0
// are divided by -|k|^2, the k2 = 0 row maps to zero.
inline SpectralField invert_laplacian_oscillating(const SpectralField& f) {
  const Grid& g = f.grid;
  SpectralField out(g);
  for (int i = 0; i < g.n1; ++i) {
    const double kx = g.k1(i);
    for (int j = 1; j < g.n2_half(); ++j) {
      const double ky = g.k2(j);
      out(i, j) = -f(i, j) / (kx * kx + ky * ky);
    }
  }
  return out;
}

inline SpectralField laplacian(const SpectralField& f) {
  const Grid& g = f.grid;
  SpectralField out(g);
  for (int i = 0; i < g.n1; ++i) {
    const double kx = g.k1(i);
    for (int j = 0; j < g.n2_half(); ++j) {
      const double ky = g.k2(j);
      out(i, j) = -(kx * kx + ky * ky) * f(i, j);
    }
  }
  return out;
}

inline RealField derivative(const RealField& f, Axis axis) {
  return inverse_transform(derivative(transform(f), axis));
}

// Spectral derivative of a horizontal profile (Nyquist mode dropped).
inline Profile derivative(const Profile& p) {
  auto c = transform(p);
  const int n = p.grid.n1;
  for (int k = 0; k <= n / 2; ++k) {
    const double kk = (k == n / 2) ? 0.0 : kTwoPi * k / p.grid.L;
    c[std::size_t(k)] *= Complex(0.0, kk);
  }
  return inverse_transform(p.grid, c);
}

// --- windows on the horizontal axis ----------------------------------------

// Nearest-sample index for a horizontal coordinate inside [0, L].
inline int snap_index(const Grid& g, double x) {
  const long idx = std::lround(x / g.dx1());
  return int(std::clamp<long>(idx, 0, g.n1));
}

// Exact integral over [x_a, x_b] of the trigonometric interpolant of `p`,
// with 0 <= x_a < x_b <= L. Endpoints are taken as given (callers snap them).
inline double window_integral(const Profile& p, double xa, double xb) {
  const auto c = transform(p);
  const int n = p.grid.n1;
  double s = c[0].real() * (xb - xa);
  for (int k = 1; k <= n / 2; ++k) {
    const double kk = kTwoPi * k / p.grid.L;
    if (k == n / 2) {
      s += c[std::size_t(k)].real() * (std::sin(kk * xb) - std::sin(kk * xa)) / kk;
    } else {
      // 2 Re( c (e^{ik b} - e^{ik a}) / (ik) )
      const Complex diff = std::polar(1.0, kk * xb) - std::polar(1.0, kk * xa);
      s += 2.0 * (c[std::size_t(k)] * diff / Complex(0.0, kk)).real();
    }
  }
  return s;
}

// --- evaluation of the trigonometric interpolant off the grid ---------------

struct PointValue {
  double value = 0.0;
  double d1 = 0.0, d2 = 0.0;
  double d11 = 0.0, d12 = 0.0, d22 = 0.0;
};

// Value, gradient and Hessian of the interpolant at (x1, x2). O(N1*N2).
inline PointValue evaluate(const SpectralField& f, double x1, double x2) {
  const Grid& g = f.grid;
  PointValue out;
  const int nh = g.n2_half();
  std::vector<Complex> b(static_cast<std::size_t>(nh));
  for (int j = 0; j < nh; ++j) {
    const double w = (j == 0 || j == g.n2 / 2) ? 1.0 : 2.0;
    b[std::size_t(j)] = w * std::polar(1.0, g.k2(j) * x2);
  }
  for (int i = 0; i < g.n1; ++i) {
    Complex s0{}, s1{}, s2{};
    for (int j = 0; j < nh; ++j) {
      const Complex t = f(i, j) * b[std::size_t(j)];
      const Complex ik2(0.0, g.k2(j));
      s0 += t;
      s1 += ik2 * t;
      s2 += ik2 * ik2 * t;
    }
    const Complex a = std::polar(1.0, g.k1(i) * x1);
    const Complex ik1(0.0, g.k1(i));
    out.value += (a * s0).real();
    out.d1 += (ik1 * a * s0).real();
    out.d2 += (a * s1).real();
    out.d11 += (ik1 * ik1 * a * s0).real();
    out.d12 += (ik1 * a * s1).real();
    out.d22 += (a * s2).real();
  }
  return out;
}

// Supremum of |f| over the continuum, not just the samples. The interpolant
// can exceed the largest sample by at most a Taylor bound built from the
// second derivatives; every sample local maximum within twice that bound of
// the largest sample is refined by Newton iteration on the interpolant.
inline double sup_norm(const SpectralField& f, const RealField& samples, int max_candidates = 16) {
  const Grid& g = f.grid;
  double best = samples.max_abs();
  if (best == 0.0) return 0.0;
  const SpectralField f1 = derivative(f, Axis::horizontal);
  const double a11 = inverse_transform(derivative(f1, Axis::horizontal)).max_abs();
  const double a12 = inverse_transform(derivative(f1, Axis::vertical)).max_abs();
  const double a22 = inverse_transform(derivative(derivative(f, Axis::vertical), Axis::vertical)).max_abs();
  const double h1 = g.dx1(), h2 = g.dx2();
  const double bound = 0.125 * (h1 * h1 * a11 + 2.0 * h1 * h2 * a12 + h2 * h2 * a22);
  const double floor = best - 2.0 * bound;

  struct Cand {
    double v;
    int i, j;
  };
  // Strict local maxima of |samples| with ties broken by storage order, so a
  // plateau or ridge contributes a single candidate.
  std::vector<Cand> local;
  for (int i = 0; i < g.n1; ++i)
    for (int j = 0; j < g.n2; ++j) {
      const double v = std::abs(samples(i, j));
      if (v < floor) continue;
      const std::size_t self = std::size_t(i) * g.n2 + j;
      bool is_max = true;
      for (int di = -1; di <= 1 && is_max; ++di)
        for (int dj = -1; dj <= 1; ++dj) {
          if (di == 0 && dj == 0) continue;
          const int ii = (i + di + g.n1) % g.n1, jj = (j + dj + g.n2) % g.n2;
          const double w = std::abs(samples(ii, jj));
          if (w > v || (w == v && std::size_t(ii) * g.n2 + jj < self)) {
            is_max = false;
            break;
          }
        }
      if (is_max) local.push_back({v, i, j});
    }
  std::sort(local.begin(), local.end(), [](const Cand& a, const Cand& b) { return a.v > b.v; });
  if (local.size() > std::size_t(max_candidates)) local.resize(std::size_t(max_candidates));
  for (const Cand& c : local) {
    const double x10 = g.x1(c.i), x20 = g.x2(c.j);
    double x1 = x10, x2 = x20;
    const double sign = samples(c.i, c.j) >= 0.0 ? 1.0 : -1.0;
    PointValue pv = evaluate(f, x1, x2);
    for (int it = 0; it < 12; ++it) {
      // Maximize sign*f by Newton steps on the gradient.
      const double g1 = sign * pv.d1, g2 = sign * pv.d2;
      const double h11 = sign * pv.d11, h12 = sign * pv.d12, h22 = sign * pv.d22;
      const double scale = std::abs(h11) + std::abs(h22) + 2.0 * std::abs(h12);
      if (scale == 0.0) break;
      const double tiny = 1e-10 * scale;
      const double det = h11 * h22 - h12 * h12;
      double s1 = 0.0, s2 = 0.0;
      if (h11 < -tiny && h22 < -tiny && det > tiny * scale) {
        s1 = -(h22 * g1 - h12 * g2) / det;
        s2 = -(-h12 * g1 + h11 * g2) / det;
      } else {
        // Degenerate or indefinite: Newton along each axis with negative curvature.
        if (h11 < -tiny) s1 = -g1 / h11;
        if (h22 < -tiny) s2 = -g2 / h22;
      }
      double n1 = std::clamp(x1 + s1, x10 - h1, x10 + h1), n2 = std::clamp(x2 + s2, x20 - h2, x20 + h2);
      if (n1 == x1 && n2 == x2) break;
      PointValue trial = evaluate(f, n1, n2);
      for (int half = 0; half < 4 && sign * trial.value < sign * pv.value; ++half) {
        n1 = 0.5 * (x1 + n1);
        n2 = 0.5 * (x2 + n2);
        trial = evaluate(f, n1, n2);
      }
      if (sign * trial.value < sign * pv.value) break;
      const bool small = std::abs(n1 - x1) < 1e-12 * h1 && std::abs(n2 - x2) < 1e-12 * h2;
      x1 = n1;
      x2 = n2;
      pv = trial;
      if (small) break;
    }
    best = std::max(best, std::abs(pv.value));
  }
  return best;
}

inline double sup_norm(const SpectralField& f) { return sup_norm(f, inverse_transform(f)); }

}  // namespace cylflow
