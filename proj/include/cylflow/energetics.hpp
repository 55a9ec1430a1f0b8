#pragma once

// Energy density, flux and dissipation profiles along x1, and the
// time-integrated ledger built from them.
//
//   e = <|u|^2>/2 + 1,  h = <(|u|^2/2 + p) u1>,  d = <|grad u|^2>,  f = d1 e - h
//
// where <.> is the vertical average (the vertical period is 1).

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cylflow/flow.hpp"
#include "cylflow/spectral.hpp"

namespace cylflow {

struct EnergyProfiles {
  double t = 0.0;
  Profile e, h, d, f;
  Profile de;  // d1 e
  Profile m;   // <u2>
  double u_sup = 0.0;
};

struct Diagnostics {
  EnergyProfiles profiles;
  VelocityField velocity;
};

// d1 e is formed as <u . d1 u> from spectral derivatives of u, so the discrete
// Cauchy-Schwarz inequality (d1 e)^2 <= 2 e d holds sample by sample.
inline Diagnostics diagnose(const SpectralField& omega_hat, double m0, double t, const RealField* omega = nullptr) {
  const Grid& g = omega_hat.grid;
  const VelocitySpectra vs = velocity_spectra(omega_hat, m0);
  Diagnostics out;
  out.velocity = velocity_from_spectra(vs);
  const VelocityField& u = out.velocity;
  const RealField w = omega ? *omega : inverse_transform(omega_hat);
  const RealField p = pressure_field(u, w);
  const RealField u11 = inverse_transform(derivative(vs.u1, Axis::horizontal));
  const RealField u12 = inverse_transform(derivative(vs.u1, Axis::vertical));
  const RealField u21 = inverse_transform(derivative(vs.u2, Axis::horizontal));
  const RealField u22 = inverse_transform(derivative(vs.u2, Axis::vertical));

  EnergyProfiles& pr = out.profiles;
  pr.t = t;
  pr.e = Profile(g);
  pr.h = Profile(g);
  pr.d = Profile(g);
  pr.f = Profile(g);
  pr.de = Profile(g);
  pr.m = u.m;
  const double inv = 1.0 / g.n2;
  double usup = 0.0;
  for (int i = 0; i < g.n1; ++i) {
    double se = 0.0, sh = 0.0, sd = 0.0, sde = 0.0;
    for (int j = 0; j < g.n2; ++j) {
      const double a = u.u1(i, j), b = u.u2(i, j);
      const double q = 0.5 * (a * a + b * b);
      se += q;
      sh += (q + p(i, j)) * a;
      sd += u11(i, j) * u11(i, j) + u12(i, j) * u12(i, j) + u21(i, j) * u21(i, j) + u22(i, j) * u22(i, j);
      sde += a * u11(i, j) + b * u21(i, j);
      usup = std::max(usup, std::sqrt(2.0 * q));
    }
    const auto k = std::size_t(i);
    pr.e[k] = se * inv + 1.0;
    pr.h[k] = sh * inv;
    pr.d[k] = sd * inv;
    pr.de[k] = sde * inv;
    pr.f[k] = pr.de[k] - pr.h[k];
  }
  pr.u_sup = usup;
  return out;
}

inline EnergyProfiles energy_profiles(const FlowState& state) {
  return diagnose(transform(state.omega), state.m0, state.t, &state.omega).profiles;
}

// --- windows ----------------------------------------------------------------

struct Window {
  double a = 0.0;
  double b = 0.0;
};

// Snapped sample range [ia, ib] of a window; indices may reach n1 (x = L).
struct SnappedWindow {
  int ia = 0;
  int ib = 0;
  double xa = 0.0;
  double xb = 0.0;
};

inline SnappedWindow snap_window(const Grid& g, double a, double b) {
  if (!(a < b)) throw std::invalid_argument("window: require a < b");
  if (a < -1e-12 * g.L || b > g.L * (1.0 + 1e-12)) throw std::invalid_argument("window: outside [0, L]");
  SnappedWindow w;
  w.ia = snap_index(g, a);
  w.ib = snap_index(g, b);
  if (w.ib <= w.ia) throw std::invalid_argument("window: degenerate after snapping to the grid");
  w.xa = g.x1(w.ia);
  w.xb = g.x1(w.ib);
  return w;
}

inline double sample(const Profile& p, int i) { return p[std::size_t(i % p.grid.n1)]; }

inline double window_max(const Profile& p, const SnappedWindow& w) {
  double s = -std::numeric_limits<double>::infinity();
  for (int i = w.ia; i <= w.ib; ++i) s = std::max(s, sample(p, i));
  return s;
}

// Window centered at c with half-width R.
inline Window centered_window(double c, double R) { return {c - R, c + R}; }

// --- ledger -----------------------------------------------------------------

// Worst ratio over all (x1, t) samples seen so far.
struct SupRecord {
  double value = 0.0;
  double x1 = 0.0;
  double t = 0.0;

  void offer(double v, double x, double time) {
    if (v > value || std::isnan(v)) {
      value = v;
      x1 = x;
      t = time;
    }
  }
};

struct LedgerSeries {
  std::vector<double> t, e_star, E_star, EE_star, u_sup, omega_sup, m_sup, sup_d;

  [[nodiscard]] std::size_t size() const { return t.size(); }
};

struct TrackedWindow {
  Window window;
  SnappedWindow snapped;
  double initial_energy = 0.0;  // int_a^b e(x, 0) dx
  double A_sup = 0.0;           // sup_{t <= T} A([a,b], t)
};

// Everything the bound checks need, as of time T. Plain data so that it can
// be written to and read back from disk.
struct LedgerData {
  Grid grid;
  double T = 0.0;
  std::size_t samples = 0;
  Profile e0, eT, E, F, D, EE2;  // EE2 = int_0^T e^2 dt per x1
  LedgerSeries series;
  SupRecord f2_ed, de2_ed, h2_ed, f2_zero_d, de2_zero_d, sup_d;
  SupRecord m2_minus_4e{-std::numeric_limits<double>::infinity(), 0.0, 0.0};
  std::vector<TrackedWindow> windows;

  [[nodiscard]] double e_star0() const { return e0.max(); }
  [[nodiscard]] double e_starT() const { return eT.max(); }
  [[nodiscard]] double E_star() const { return E.max(); }
  [[nodiscard]] double EE_star() const { return std::sqrt(std::max(0.0, EE2.max())); }
  // d vanished identically at t = 0: the initial state is an equilibrium.
  [[nodiscard]] bool equilibrium() const { return series.size() > 0 && series.sup_d.front() <= 1e-28; }

  [[nodiscard]] double available_energy(const SnappedWindow& w) const {
    return window_integral(e0, w.xa, w.xb) + sample(F, w.ib) - sample(F, w.ia);
  }
  [[nodiscard]] double dissipated_energy(const SnappedWindow& w) const { return window_integral(D, w.xa, w.xb); }
};

class EnergyLedger {
 public:
  explicit EnergyLedger(const Grid& g, std::vector<Window> windows = {}) : requested_(std::move(windows)) {
    d_.grid = g;
    d_.e0 = d_.eT = d_.E = d_.F = d_.D = d_.EE2 = Profile(g);
  }

  // Ingest the profiles of the next accepted time level.
  void accumulate(const EnergyProfiles& p, double omega_sup) {
    const Grid& g = d_.grid;
    require_same_grid(g, p.e.grid, "ledger");
    if (d_.samples == 0) {
      if (p.t != 0.0) throw std::invalid_argument("ledger: first time stamp must be 0");
      d_.e0 = p.e;
      for (const Window& w : requested_) {
        TrackedWindow tw{w, snap_window(g, w.a, w.b), 0.0, 0.0};
        tw.initial_energy = window_integral(d_.e0, tw.snapped.xa, tw.snapped.xb);
        tw.A_sup = tw.initial_energy;
        d_.windows.push_back(tw);
      }
    } else {
      if (!(p.t > d_.T)) throw std::invalid_argument("ledger: time stamps must increase");
      const double dt = p.t - d_.T;
      for (int i = 0; i < g.n1; ++i) {
        const auto k = std::size_t(i);
        d_.E[k] += 0.5 * dt * (last_.e[k] + p.e[k]);
        d_.F[k] += 0.5 * dt * (last_.f[k] + p.f[k]);
        d_.D[k] += 0.5 * dt * (last_.d[k] + p.d[k]);
        d_.EE2[k] += 0.5 * dt * (last_.e[k] * last_.e[k] + p.e[k] * p.e[k]);
      }
      for (TrackedWindow& tw : d_.windows)
        tw.A_sup = std::max(tw.A_sup, tw.initial_energy + sample(d_.F, tw.snapped.ib) - sample(d_.F, tw.snapped.ia));
    }
    d_.T = p.t;
    d_.eT = p.e;
    ++d_.samples;

    double dmax = 0.0, msup = 0.0;
    for (int i = 0; i < g.n1; ++i) {
      const auto k = std::size_t(i);
      const double x = g.x1(i), e = p.e[k], d = p.d[k];
      dmax = std::max(dmax, d);
      msup = std::max(msup, std::abs(p.m[k]));
      const double ed = e * d;
      if (ed > 0.0) {
        d_.f2_ed.offer(p.f[k] * p.f[k] / ed, x, p.t);
        d_.de2_ed.offer(p.de[k] * p.de[k] / ed, x, p.t);
        d_.h2_ed.offer(p.h[k] * p.h[k] / ed, x, p.t);
      } else {
        d_.f2_zero_d.offer(p.f[k] * p.f[k], x, p.t);
        d_.de2_zero_d.offer(p.de[k] * p.de[k], x, p.t);
      }
      d_.m2_minus_4e.offer(p.m[k] * p.m[k] - 4.0 * e, x, p.t);
    }
    d_.sup_d.offer(dmax, 0.0, p.t);

    LedgerSeries& s = d_.series;
    s.t.push_back(p.t);
    s.e_star.push_back(p.e.max());
    s.E_star.push_back(d_.E_star());
    s.EE_star.push_back(d_.EE_star());
    s.u_sup.push_back(p.u_sup);
    s.omega_sup.push_back(omega_sup);
    s.m_sup.push_back(msup);
    s.sup_d.push_back(d_.sup_d.value);
    last_ = p;
  }

  [[nodiscard]] const LedgerData& data() const { return d_; }
  [[nodiscard]] const Grid& grid() const { return d_.grid; }
  [[nodiscard]] double T() const { return d_.T; }
  [[nodiscard]] const EnergyProfiles& last() const { return last_; }

 private:
  LedgerData d_;
  EnergyProfiles last_;
  std::vector<Window> requested_;
};

// A([a,b],T) = int_a^b e(x,0) dx + F(b,T) - F(a,T), endpoints snapped.
inline double available_energy(const LedgerData& l, double a, double b) {
  return l.available_energy(snap_window(l.grid, a, b));
}

// D([a,b],T) = int_a^b D(x,T) dx.
inline double dissipated_energy(const LedgerData& l, double a, double b) {
  return l.dissipated_energy(snap_window(l.grid, a, b));
}

// |int_a^b (e(x,T) - e(x,0)) dx - (F(b,T) - F(a,T)) + D([a,b],T)|
inline double balance_residual(const LedgerData& l, double a, double b) {
  const SnappedWindow w = snap_window(l.grid, a, b);
  const double de = window_integral(l.eT, w.xa, w.xb) - window_integral(l.e0, w.xa, w.xb);
  return std::abs(de - (sample(l.F, w.ib) - sample(l.F, w.ia)) + l.dissipated_energy(w));
}

}  // namespace cylflow
