#pragma once

// Framework constants and the inequality checks run against a ledger.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cylflow/energetics.hpp"
#include "cylflow/kernel.hpp"
#include "cylflow/report.hpp"

namespace cylflow {

struct Constants {
  double M = 0.0;
  double C1 = 0.0, C2 = 0.0;
  double c_a = 0.0, c_b = 0.0;  // factors in |h1| <= c_a C1 M sqrt(ed), |h2| <= c_b C2 M^2 sqrt(ed)
  double poincare = 0.0;        // <g^2> <= poincare^2 <(d2 g)^2> for <g> = 0
  double C4 = 0.0;
  double beta = 0.0;
  double gamma = 2.0;
  double delta = 0.0;  // runtime estimate 2 sup d, filled in by the checks that need it
  double sigma = 0.0;
  double kappa = 0.0;
  std::vector<std::string> derivation;
};

inline double kappa_from_sigma(double sigma) {
  const double a = sigma * (1.0 + sigma);
  const double r = a + std::sqrt(a * a + (1.0 + sigma));
  return r * r;
}

inline Constants derive_constants(const KernelConstants& k, double M) {
  if (!(M > 0.0) || !std::isfinite(M)) throw std::invalid_argument("derive_constants: M must be positive");
  if (!(k.C1 > 0.0 && k.C2 > 0.0)) throw std::invalid_argument("derive_constants: kernel constants must be positive");
  Constants c;
  c.M = M;
  c.C1 = k.C1;
  c.C2 = k.C2;
  c.poincare = 1.0 / (2.0 * std::numbers::pi);
  c.c_a = std::sqrt(10.0) / (4.0 * std::numbers::pi);
  c.c_b = c.poincare;
  const double sqrtC4 = c.c_a * c.C1 * M + c.c_b * c.C2 * M * M;
  c.C4 = sqrtC4 * sqrtC4;
  c.beta = 2.0 * c.gamma + 2.0 * c.C4;
  c.sigma = std::pow(c.beta * c.gamma, 0.25);
  c.kappa = kappa_from_sigma(c.sigma);
  auto num = [](double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
  };
  c.derivation = {
      "M = " + num(M) + " (sup |omega(.,0)|)",
      "C1 = " + num(c.C1) + ", C2 = " + num(c.C2) + " (kernel norms)",
      "Poincare on T for <g> = 0: <g^2>^(1/2) <= (1/2pi) <(d2 g)^2>^(1/2); <u1^2> <= d/(4 pi^2)",
      "|m| <= <u2^2>^(1/2), <(u2+m)^2> <= 4<u2^2>, <|u|^2> <= 2e",
      "h1 = 1/2 <(u1^2 + u2hat (u2+m)) u1>: |h1| <= 1/2 C1 M (|u1|_2 + 2|u2|_2) |u1|_2 <= 1/2 C1 M sqrt(5) sqrt(2e) sqrt(d)/(2pi)",
      "c_a = sqrt(10)/(4 pi) = " + num(c.c_a),
      "h2 = <p u1>: |h2| <= C2 M^2 <u1^2>^(1/2) <= C2 M^2 sqrt(d)/(2pi) <= C2 M^2 sqrt(ed)/(2pi) since e >= 1",
      "c_b = 1/(2 pi) = " + num(c.c_b),
      "sqrt(C4) = c_a C1 M + c_b C2 M^2 = " + num(sqrtC4) + ", C4 = " + num(c.C4),
      "gamma = 2: (d1 e)^2 = <u.d1 u>^2 <= <|u|^2><|d1 u|^2> <= 2 e d",
      "beta = 2 gamma + 2 C4 = " + num(c.beta) + "  [f^2 <= 2(d1 e)^2 + 2 h^2]",
      "sigma = (beta gamma)^(1/4) = " + num(c.sigma),
      "sqrt(kappa) = sigma(1+sigma) + sqrt(sigma^2 (1+sigma)^2 + 1 + sigma), kappa = " + num(c.kappa),
  };
  return c;
}

// Length of the periodic box needed to emulate R over [0, T].
inline double horizon_length(const Constants& c, double T) { return 4.0 * std::sqrt(c.beta * c.kappa * T); }
inline bool horizon_ok(const Constants& c, double L, double T) { return L >= horizon_length(c, T); }

namespace detail {

inline std::string at(double x1, double t) {
  std::ostringstream os;
  os.precision(10);
  os << "x1=" << x1 << " t=" << t;
  return os.str();
}

inline std::string window_name(double a, double b) {
  std::ostringstream os;
  os.precision(10);
  os << "[" << a << "," << b << "]";
  return os.str();
}

inline void tag(BoundReport& r, const Constants& c, std::initializer_list<const char*> keys) {
  for (const char* k : keys) {
    const std::string s = k;
    if (s == "beta") r.constants[s] = c.beta;
    else if (s == "gamma") r.constants[s] = c.gamma;
    else if (s == "kappa") r.constants[s] = c.kappa;
    else if (s == "C1") r.constants[s] = c.C1;
    else if (s == "C4") r.constants[s] = c.C4;
    else if (s == "M") r.constants[s] = c.M;
    else if (s == "delta") r.constants[s] = c.delta;
  }
}

}  // namespace detail

// (A2') f^2 <= beta e d over all samples; where d = 0 the flux must vanish.
inline BoundReport check_A2prime(const LedgerData& l, const Constants& c) {
  auto r = make_report("A2prime", l.f2_ed.value, c.beta, detail::at(l.f2_ed.x1, l.f2_ed.t), 1e-6);
  if (l.f2_zero_d.value > r.abs_tol) {
    r.verdict = Verdict::fail;
    r.note = "nonzero flux where d = 0 at " + detail::at(l.f2_zero_d.x1, l.f2_zero_d.t);
  }
  detail::tag(r, c, {"beta"});
  return r;
}

// (A5) (d1 e)^2 <= 2 e d.
inline BoundReport check_A5(const LedgerData& l) {
  auto r = make_report("A5", l.de2_ed.value, 2.0, detail::at(l.de2_ed.x1, l.de2_ed.t));
  if (l.de2_zero_d.value > r.abs_tol) {
    r.verdict = Verdict::fail;
    r.note = "nonzero d1 e where d = 0 at " + detail::at(l.de2_zero_d.x1, l.de2_zero_d.t);
  }
  r.constants["gamma"] = 2.0;
  return r;
}

// h^2 <= C4 e d, the flux half of the chain behind beta.
inline BoundReport check_C4(const LedgerData& l, const Constants& c) {
  auto r = make_report("h2_C4", l.h2_ed.value, c.C4, detail::at(l.h2_ed.x1, l.h2_ed.t), 1e-6);
  detail::tag(r, c, {"C4"});
  return r;
}

// m^2 <= 4e + 2 C1^2 M^2.
inline BoundReport check_mbound2(const LedgerData& l, const Constants& c) {
  const double C = 2.0 * c.C1 * c.C1 * c.M * c.M;
  auto r = make_report("mbound2", l.m2_minus_4e.value, C, detail::at(l.m2_minus_4e.x1, l.m2_minus_4e.t), 1e-6);
  detail::tag(r, c, {"C1", "M"});
  return r;
}

// sup|m(t)| <= M a/2 + (C + 4 e*(0)(1 + sqrt(kappa beta t)/a))^(1/2), a = t^(1/6).
inline BoundReport check_mbound4(const LedgerData& l, const Constants& c) {
  const double C = 2.0 * c.C1 * c.C1 * c.M * c.M;
  const double e0 = l.e_star0();
  double worst = -1.0, lhs = 0.0, rhs = 0.0, tw = 0.0;
  for (std::size_t n = 0; n < l.series.size(); ++n) {
    const double t = l.series.t[n];
    if (t <= 0.0) continue;
    const double a = std::pow(t, 1.0 / 6.0);
    const double bound = c.M * a / 2.0 + std::sqrt(C + 4.0 * e0 * (1.0 + std::sqrt(c.kappa * c.beta * t) / a));
    const double ratio = l.series.m_sup[n] / bound;
    if (ratio > worst) {
      worst = ratio;
      lhs = l.series.m_sup[n];
      rhs = bound;
      tw = t;
    }
  }
  auto r = make_report("mbound4", lhs, rhs, "t=" + std::to_string(tw), 1e-9, 1e-12, horizon_ok(c, l.grid.L, l.T));
  detail::tag(r, c, {"beta", "kappa", "C1", "M"});
  return r;
}

// F(a,T) <= sqrt(beta e*([a,b],0) E*([a,b],T)) + beta E*([a,b],T)/(b-a) and
// the mirrored lower bound at b.
inline std::array<BoundReport, 2> check_local_flux(const LedgerData& l, double a, double b, const Constants& c) {
  const SnappedWindow w = snap_window(l.grid, a, b);
  const double es = window_max(l.e0, w), Es = window_max(l.E, w);
  const double rhs = std::sqrt(c.beta * es * Es) + c.beta * Es / (w.xb - w.xa);
  const std::string name = detail::window_name(w.xa, w.xb);
  auto left = make_report("localflux_left" + name, sample(l.F, w.ia), rhs, "x1=" + std::to_string(w.xa));
  auto right = make_report("localflux_right" + name, -sample(l.F, w.ib), rhs, "x1=" + std::to_string(w.xb));
  for (auto* r : {&left, &right}) {
    detail::tag(*r, c, {"beta"});
    r->constants["e_star_window_0"] = es;
    r->constants["E_star_window_T"] = Es;
  }
  return {left, right};
}

// |F(x,T)| <= sqrt(beta e*(0) E*(T))  and  |F(x,T)| <= e*(0) sqrt(kappa beta T).
inline std::array<BoundReport, 2> check_global_flux(const LedgerData& l, const Constants& c) {
  double fmax = 0.0;
  int imax = 0;
  for (int i = 0; i < l.grid.n1; ++i)
    if (std::abs(l.F[std::size_t(i)]) > fmax) {
      fmax = std::abs(l.F[std::size_t(i)]);
      imax = i;
    }
  const bool hz = horizon_ok(c, l.grid.L, l.T);
  const std::string loc = detail::at(l.grid.x1(imax), l.T);
  auto r1 = make_report("fluxbound", fmax, std::sqrt(c.beta * l.e_star0() * l.E_star()), loc, 1e-9, 1e-12, hz);
  auto r2 = make_report("flux", fmax, l.e_star0() * std::sqrt(c.kappa * c.beta * l.T), loc, 1e-9, 1e-12, hz);
  detail::tag(r1, c, {"beta"});
  detail::tag(r2, c, {"beta", "kappa"});
  return {r1, r2};
}

// EE*(T) <= kappa e*(0) sqrt(T), E*(T) <= kappa e*(0) T, and on each tracked
// window (int_0^T e^2)^(1/2) <= (sqrt(T)/(b-a) + sqrt(gamma)) sup_t A([a,b],t).
inline std::vector<BoundReport> check_L2_energy(const LedgerData& l, const Constants& c) {
  const bool hz = horizon_ok(c, l.grid.L, l.T);
  const double e0 = l.e_star0();
  std::vector<BoundReport> out;
  out.push_back(make_report("L2energy_EE", l.EE_star(), c.kappa * e0 * std::sqrt(l.T), "T=" + std::to_string(l.T),
                            1e-9, 1e-12, hz));
  out.push_back(
      make_report("L2energy_E", l.E_star(), c.kappa * e0 * l.T, "T=" + std::to_string(l.T), 1e-9, 1e-12, hz));
  // Cauchy-Schwarz E*(T) <= sqrt(T) EE*(T) holds exactly for positive-weight quadrature.
  out.push_back(make_report("E_star_cauchy_schwarz", l.E_star(), std::sqrt(l.T) * l.EE_star(), "T=" + std::to_string(l.T)));
  for (auto& r : out) detail::tag(r, c, {"kappa"});
  for (const TrackedWindow& tw : l.windows) {
    double lhs = 0.0;
    int arg = tw.snapped.ia;
    for (int i = tw.snapped.ia; i <= tw.snapped.ib; ++i) {
      const double v = std::sqrt(std::max(0.0, sample(l.EE2, i)));
      if (v > lhs) {
        lhs = v;
        arg = i;
      }
    }
    const double len = tw.snapped.xb - tw.snapped.xa;
    auto r = make_report("L2first" + detail::window_name(tw.snapped.xa, tw.snapped.xb), lhs,
                         (std::sqrt(l.T) / len + std::sqrt(c.gamma)) * tw.A_sup, "x1=" + std::to_string(l.grid.x1(arg)));
    r.constants["A_sup"] = tw.A_sup;
    r.constants["gamma"] = c.gamma;
    out.push_back(r);
  }
  return out;
}

// int_{-R}^{R} e(x,T) dx + D([-R,R],T) <= 2 e*(0) (R + sqrt(kappa beta T)) on
// the window of half-width R about `center` (box center by default).
inline BoundReport check_dissipation(const LedgerData& l, double R, const Constants& c, double center = -1.0,
                                     const std::string& name = "dissip") {
  if (!(R > 0.0) || 2.0 * R > l.grid.L * (1.0 + 1e-12))
    throw std::invalid_argument("check_dissipation: window exceeds the box");
  const double x0 = center < 0.0 ? l.grid.L / 2.0 : center;
  const SnappedWindow w = snap_window(l.grid, std::max(0.0, x0 - R), std::min(l.grid.L, x0 + R));
  const double lhs = window_integral(l.eT, w.xa, w.xb) + l.dissipated_energy(w);
  const double Reff = 0.5 * (w.xb - w.xa);
  auto r = make_report(name + "_R=" + std::to_string(R), lhs, 2.0 * l.e_star0() * (Reff + std::sqrt(c.kappa * c.beta * l.T)),
                       detail::window_name(w.xa, w.xb), 1e-9, 1e-12, horizon_ok(c, l.grid.L, l.T));
  detail::tag(r, c, {"beta", "kappa"});
  r.constants["R"] = Reff;
  return r;
}

// The R = sqrt(beta T) specialization, skipped when the window does not fit.
inline BoundReport check_dissipation_sqrt_beta_T(const LedgerData& l, const Constants& c) {
  const double R = std::sqrt(c.beta * l.T);
  if (2.0 * R > l.grid.L || R < l.grid.dx1()) {
    BoundReport r;
    r.name = "dissip_sqrt_beta_T";
    r.verdict = Verdict::skipped;
    r.note = "window 2 sqrt(beta T) does not fit the box";
    r.constants["R"] = R;
    return r;
  }
  return check_dissipation(l, R, c, -1.0, "dissip_sqrt_beta_T");
}

// e*(t) <= max(4 e*(0), (4 e*(0))^(2/3) (delta kappa beta t)^(1/3)) with
// delta = 2 sup d over [0, t].
inline BoundReport check_growth_maxform(const LedgerData& l, Constants c) {
  const double e0 = l.e_star0();
  double worst = -1.0, lhs = 0.0, rhs = 0.0, tw = 0.0, dw = 0.0;
  for (std::size_t n = 0; n < l.series.size(); ++n) {
    const double t = l.series.t[n];
    const double delta = 2.0 * l.series.sup_d[n];
    const double bound = std::max(4.0 * e0, std::pow(4.0 * e0, 2.0 / 3.0) * std::cbrt(delta * c.kappa * c.beta * t));
    const double ratio = l.series.e_star[n] / bound;
    if (ratio > worst) {
      worst = ratio;
      lhs = l.series.e_star[n];
      rhs = bound;
      tw = t;
      dw = delta;
    }
  }
  c.delta = dw;
  auto r = make_report("growth", lhs, rhs, "t=" + std::to_string(tw), 1e-9, 1e-12, horizon_ok(c, l.grid.L, l.T));
  detail::tag(r, c, {"beta", "kappa", "delta"});
  return r;
}

// ||u(T)||/T^(1/6) against K e*(0)^(1/3), K = 3 (M/2)^(1/3) (beta kappa)^(1/6).
// A limsup statement: reported as a trend, never pass/fail.
inline BoundReport pointwise_trend(const LedgerData& l, const Constants& c) {
  BoundReport r;
  r.name = "pointwise_t^(1/6)";
  const double K = 3.0 * std::cbrt(c.M / 2.0) * std::pow(c.beta * c.kappa, 1.0 / 6.0);
  r.lhs = l.T > 0.0 ? l.series.u_sup.back() / std::pow(l.T, 1.0 / 6.0) : 0.0;
  r.rhs = K * std::cbrt(l.e_star0());
  r.slack = r.rhs - r.lhs;
  r.verdict = Verdict::trend;
  r.unconditional = false;
  r.location = "T=" + std::to_string(l.T);
  r.constants["K"] = K;
  return r;
}

// For a non-equilibrium run, some x1 must have lost energy by time T.
inline BoundReport check_monotone_energy(const LedgerData& l) {
  BoundReport r;
  r.name = "c:zero";
  if (l.equilibrium()) {
    r.verdict = Verdict::skipped;
    r.note = "equilibrium initial data";
    return r;
  }
  double mn = std::numeric_limits<double>::infinity();
  int arg = 0;
  for (int i = 0; i < l.grid.n1; ++i) {
    const double v = l.eT[std::size_t(i)] - l.e0[std::size_t(i)];
    if (v < mn) {
      mn = v;
      arg = i;
    }
  }
  r.lhs = mn;
  r.rhs = 0.0;
  r.slack = -mn;
  r.location = detail::at(l.grid.x1(arg), l.T);
  r.verdict = mn < 0.0 ? Verdict::pass : Verdict::fail;
  return r;
}

// ||omega(t)|| nonincreasing up to an overshoot of 1e-8 ||omega(0)||.
inline BoundReport check_maximum_principle(const LedgerData& l) {
  const auto& w = l.series.omega_sup;
  double worst = 0.0, tw = 0.0;
  for (std::size_t n = 1; n < w.size(); ++n)
    if (w[n] - w[n - 1] > worst) {
      worst = w[n] - w[n - 1];
      tw = l.series.t[n];
    }
  const double w0 = w.empty() ? 0.0 : w.front();
  auto r = make_report("max_principle", worst, 1e-8 * w0, "t=" + std::to_string(tw), 0.0, 1e-300);
  r.constants["omega_sup_0"] = w0;
  return r;
}

inline BoundReport check_balance(const LedgerData& l, double a, double b) {
  const double res = balance_residual(l, a, b);
  const double D = dissipated_energy(l, a, b);
  const SnappedWindow w = snap_window(l.grid, a, b);
  auto r = make_report("balance" + detail::window_name(w.xa, w.xb), res, 1e-3 * std::max(D, 1.0));
  r.constants["D"] = D;
  return r;
}

struct JTMeasure {
  std::vector<double> R;
  std::vector<int> indicator;  // 1 where int e(T) >= int e(0) on [-R, R]
  double measure = 0.0;
  double threshold = 0.0;  // indicator vanishes for all R >= threshold
  bool vanishes_at_box_scale = false;
  bool equilibrium = false;
};

// Lebesgue measure of J_T restricted to R_grid, by trapezoid over the grid.
inline JTMeasure measure_JT(const LedgerData& l, std::vector<double> R_grid = {}, double center = -1.0) {
  const double c = center < 0.0 ? l.grid.L / 2.0 : center;
  if (R_grid.empty())
    for (int k = 1; k <= l.grid.n1 / 2; ++k) R_grid.push_back(k * l.grid.dx1());
  JTMeasure out;
  out.equilibrium = l.equilibrium();
  for (double R : R_grid) {
    if (!(R > 0.0) || R > l.grid.L / 2.0 * (1.0 + 1e-12)) throw std::invalid_argument("measure_JT: R outside (0, L/2]");
    const SnappedWindow w = snap_window(l.grid, std::max(0.0, c - R), std::min(l.grid.L, c + R));
    const double dE = window_integral(l.eT, w.xa, w.xb) - window_integral(l.e0, w.xa, w.xb);
    out.R.push_back(R);
    out.indicator.push_back(dE >= 0.0 ? 1 : 0);
  }
  for (std::size_t k = 1; k < out.R.size(); ++k)
    out.measure += 0.5 * (out.R[k] - out.R[k - 1]) * (out.indicator[k] + out.indicator[k - 1]);
  out.threshold = out.R.empty() ? 0.0 : out.R.front();
  for (std::size_t k = out.R.size(); k-- > 0;)
    if (out.indicator[k]) {
      out.threshold = k + 1 < out.R.size() ? out.R[k + 1] : out.R[k];
      break;
    }
  out.vanishes_at_box_scale = !out.indicator.empty() && out.indicator.back() == 0;
  return out;
}

inline BoundReport report_JT(const LedgerData& l, const JTMeasure& m) {
  BoundReport r;
  r.name = "J_T_measure";
  r.lhs = m.measure;
  r.rhs = l.grid.L / 2.0;
  r.slack = r.rhs - r.lhs;
  r.unconditional = false;
  r.constants["threshold"] = m.threshold;
  if (m.equilibrium) {
    r.verdict = Verdict::skipped;
    r.note = "equilibrium: indicator identically 1";
  } else {
    r.verdict = m.vanishes_at_box_scale && m.measure < r.rhs ? Verdict::pass : Verdict::fail;
  }
  return r;
}

struct CheckOptions {
  std::vector<Window> windows;            // local flux and balance windows
  std::vector<double> dissipation_R;      // half-widths about the box center; empty: {L/8, L/4}
};

// The whole battery for one ledger state.
inline std::vector<BoundReport> run_checks(const LedgerData& l, const Constants& c, const CheckOptions& opt = {}) {
  std::vector<BoundReport> out;
  out.push_back(check_maximum_principle(l));
  out.push_back(check_A5(l));
  out.push_back(check_A2prime(l, c));
  out.push_back(check_C4(l, c));
  out.push_back(check_mbound2(l, c));
  out.push_back(check_balance(l, 0.0, l.grid.L));
  for (const Window& w : opt.windows) {
    out.push_back(check_balance(l, w.a, w.b));
    for (auto& r : check_local_flux(l, w.a, w.b, c)) out.push_back(r);
  }
  for (auto& r : check_global_flux(l, c)) out.push_back(r);
  for (auto& r : check_L2_energy(l, c)) out.push_back(r);
  std::vector<double> Rs = opt.dissipation_R;
  if (Rs.empty()) Rs = {l.grid.L / 8.0, l.grid.L / 4.0};
  for (double R : Rs) out.push_back(check_dissipation(l, R, c));
  out.push_back(check_dissipation_sqrt_beta_T(l, c));
  out.push_back(check_growth_maxform(l, c));
  out.push_back(check_mbound4(l, c));
  out.push_back(pointwise_trend(l, c));
  out.push_back(check_monotone_energy(l));
  out.push_back(report_JT(l, measure_JT(l)));
  return out;
}

inline bool any_unconditional_failure(const std::vector<BoundReport>& reports) {
  return std::any_of(reports.begin(), reports.end(), [](const BoundReport& r) { return r.failed() && r.unconditional; });
}

}  // namespace cylflow
