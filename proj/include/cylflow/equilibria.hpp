#pragma once

// Distance to the family of constant vertical flows (0, m), the interpolation
// estimate for that distance, and the time a trajectory spends far from it.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "cylflow/energetics.hpp"
#include "cylflow/flow.hpp"
#include "cylflow/report.hpp"

namespace cylflow {

struct EquilibriumDistance {
  double distance = 0.0;
  double m_star = 0.0;
};

// Sample columns of the window [c - R, c + R], c = L/2 unless given.
inline SnappedWindow equilibrium_window(const Grid& g, double R, double center = -1.0) {
  if (!(R > 0.0) || 2.0 * R > g.L * (1.0 + 1e-12)) throw std::invalid_argument("distance: window exceeds the box");
  const double c = center < 0.0 ? g.L / 2.0 : center;
  if (c - R < -1e-12 * g.L || c + R > g.L * (1.0 + 1e-12))
    throw std::invalid_argument("distance: window leaves [0, L]");
  return snap_window(g, std::max(0.0, c - R), std::min(g.L, c + R));
}

inline double equilibrium_gap_sq(const VelocityField& u, const SnappedWindow& w, double m) {
  const Grid& g = u.u1.grid;
  double s = 0.0;
  for (int ii = w.ia; ii <= w.ib; ++ii) {
    const int i = ii % g.n1;
    for (int j = 0; j < g.n2; ++j) {
      const double a = u.u1(i, j), b = u.u2(i, j) - m;
      s = std::max(s, a * a + b * b);
    }
  }
  return s;
}

// g(m) = max over window samples of |u - (0, m)|; convex in m.
inline double equilibrium_gap(const VelocityField& u, const SnappedWindow& w, double m) {
  return std::sqrt(equilibrium_gap_sq(u, w, m));
}

// d_R(u, E) = inf_m sup_{B_R} |u - (0, m)| by ternary search.
inline EquilibriumDistance distance_to_equilibria(const VelocityField& u, double R, double center = -1.0) {
  const Grid& g = u.u1.grid;
  const SnappedWindow w = equilibrium_window(g, R, center);
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (int ii = w.ia; ii <= w.ib; ++ii)
    for (int j = 0; j < g.n2; ++j) {
      lo = std::min(lo, u.u2(ii % g.n1, j));
      hi = std::max(hi, u.u2(ii % g.n1, j));
    }
  lo -= 1.0;
  hi += 1.0;
  while (hi - lo > 1e-10) {
    const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
    if (equilibrium_gap_sq(u, w, m1) <= equilibrium_gap_sq(u, w, m2))
      hi = m2;
    else
      lo = m1;
  }
  const double m = 0.5 * (lo + hi);
  return {equilibrium_gap(u, w, m), m};
}

struct DistLemmaSample {
  double rho = 0.0;
  double distance = 0.0;
  double grad_norm = 0.0;  // ||grad u||_{L2(B_R)}
  bool trivial = false;    // distance and gradient both vanish
};

// rho = d_R / (M^theta R^((1+theta)/2) ||grad u||_{L2(B_R)}^(1-theta)).
inline DistLemmaSample dist_lemma_ratio(const FlowState& state, double R, double theta, double M,
                                        double center = -1.0) {
  if (!(R >= 1.0)) throw std::invalid_argument("dist lemma: R must be >= 1");
  if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("dist lemma: theta must lie in (0,1)");
  if (!(M > 0.0)) throw std::invalid_argument("dist lemma: M must be positive");
  if (state.omega.max_abs() > M * (1.0 + 1e-9)) throw std::invalid_argument("dist lemma: ||omega|| exceeds M");
  const Diagnostics dg = diagnose(transform(state.omega), state.m0, state.t, &state.omega);
  const SnappedWindow w = equilibrium_window(state.omega.grid, R, center);
  DistLemmaSample s;
  s.distance = distance_to_equilibria(dg.velocity, R, center).distance;
  s.grad_norm = std::sqrt(std::max(0.0, window_integral(dg.profiles.d, w.xa, w.xb)));
  if (s.distance <= 1e-10 && s.grad_norm <= 1e-10) {
    s.trivial = true;
    return s;
  }
  s.rho = s.distance / (std::pow(M, theta) * std::pow(R, 0.5 * (1.0 + theta)) * std::pow(s.grad_norm, 1.0 - theta));
  return s;
}

// Uniform boundedness over an ensemble: max rho <= 10 median rho.
inline BoundReport check_dist_lemma(const std::vector<DistLemmaSample>& ensemble) {
  std::vector<double> rho;
  for (const auto& s : ensemble)
    if (!s.trivial) rho.push_back(s.rho);
  BoundReport r;
  r.name = "dist_lemma";
  r.unconditional = false;
  if (rho.empty()) {
    r.verdict = Verdict::skipped;
    r.note = "all samples trivial (equilibria)";
    return r;
  }
  std::sort(rho.begin(), rho.end());
  const std::size_t n = rho.size();
  const double median = n % 2 ? rho[n / 2] : 0.5 * (rho[n / 2 - 1] + rho[n / 2]);
  r = make_report("dist_lemma", rho.back(), 10.0 * median);
  r.unconditional = false;
  r.constants["median_rho"] = median;
  r.constants["samples"] = double(n);
  return r;
}

struct DistanceSeries {
  double R = 2.0;
  double center = -1.0;
  std::vector<double> t, d_R, m_star;

  void record(double time, const VelocityField& u) {
    const EquilibriumDistance d = distance_to_equilibria(u, R, center);
    t.push_back(time);
    d_R.push_back(d.distance);
    m_star.push_back(d.m_star);
  }
};

struct OccupationRecord {
  double epsilon = 0.0;
  double R = 0.0;
  double T = 0.0;
  double time_outside = 0.0;
  std::size_t samples = 0;

  [[nodiscard]] double fraction() const { return T > 0.0 ? time_outside / T : 0.0; }
};

// Left-point quadrature of the indicator d_R >= epsilon over [0, T].
inline OccupationRecord occupation_time(const DistanceSeries& s, double epsilon, double T) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("occupation_time: epsilon must be positive");
  OccupationRecord r{epsilon, s.R, T, 0.0, 0};
  for (std::size_t n = 0; n + 1 < s.t.size() && s.t[n] < T; ++n) {
    const double t1 = std::min(s.t[n + 1], T);
    if (s.d_R[n] >= epsilon) r.time_outside += t1 - s.t[n];
    ++r.samples;
  }
  r.time_outside = std::clamp(r.time_outside, 0.0, T);
  return r;
}

// Least-squares slope of log y against log x over the positive pairs.
inline double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t k = 0; k < std::min(x.size(), y.size()); ++k) {
    if (!(x[k] > 0.0 && y[k] > 0.0)) continue;
    const double lx = std::log(x[k]), ly = std::log(y[k]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  const double den = n * sxx - sx * sx;
  if (n < 2 || den == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return (n * sxy - sx * sy) / den;
}

}  // namespace cylflow
