#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

using namespace cylflow;
using namespace testing_support;

namespace {

// Kolmogorov flow u = (0, U sin(k x1) e^{-k^2 t}): u1 = 0, p = 0, h = 0.
struct KolmogorovOracle {
  double U, k;
  double a(double t) const { return std::exp(-k * k * t); }
  double e(double x, double t) const { return 1.0 + 0.5 * U * U * a(t) * a(t) * std::sin(k * x) * std::sin(k * x); }
  double d(double x, double t) const { return U * U * k * k * a(t) * a(t) * std::cos(k * x) * std::cos(k * x); }
  double de(double x, double t) const { return U * U * k * a(t) * a(t) * std::sin(k * x) * std::cos(k * x); }
  // Time integrals over [0, T].
  double g(double T) const { return (1.0 - std::exp(-2.0 * k * k * T)) / (2.0 * k * k); }
  double E(double x, double T) const { return T + 0.5 * U * U * std::sin(k * x) * std::sin(k * x) * g(T); }
  double D(double x, double T) const { return U * U * k * k * std::cos(k * x) * std::cos(k * x) * g(T); }
  double F(double x, double T) const { return U * U * k * std::sin(k * x) * std::cos(k * x) * g(T); }
};

EnergyProfiles synthetic(const Grid& g, double t, const std::function<double(double, double)>& e) {
  EnergyProfiles p;
  p.t = t;
  p.e = p.h = p.d = p.f = p.de = p.m = Profile(g);
  for (int i = 0; i < g.n1; ++i) {
    const auto k = std::size_t(i);
    p.e[k] = e(g.x1(i), t);
    p.d[k] = 1.0 + t;
    p.f[k] = p.de[k] = 0.5 * t;
  }
  return p;
}

}  // namespace

TEST_CASE("profiles of Kolmogorov flow") {
  const Grid g{8.0, 64, 16};
  const double U = 1.3;
  const KolmogorovOracle k{U, kTwoPi / g.L};
  const EnergyProfiles p = energy_profiles(kolmogorov(g, U));
  double err = 0.0;
  for (int i = 0; i < g.n1; ++i) {
    const auto n = std::size_t(i);
    const double x = g.x1(i);
    err = std::max({err, std::abs(p.e[n] - k.e(x, 0)), std::abs(p.d[n] - k.d(x, 0)), std::abs(p.h[n]),
                    std::abs(p.de[n] - k.de(x, 0)), std::abs(p.f[n] - k.de(x, 0)),
                    std::abs(p.m[n] - U * std::sin(k.k * x))});
  }
  CHECK(err < 1e-12);
  CHECK(p.u_sup == doctest::Approx(U).epsilon(1e-3));
}

TEST_CASE("profiles of a uniform flow and a Taylor-Green cell") {
  const Grid g{6.0, 32, 32};
  const EnergyProfiles u = energy_profiles(uniform_flow(g, 0.8));
  for (int i = 0; i < g.n1; ++i) {
    const auto n = std::size_t(i);
    CHECK(u.e[n] == doctest::Approx(1.32).epsilon(1e-14));
    CHECK(std::abs(u.d[n]) < 1e-28);
    CHECK(std::abs(u.f[n]) < 1e-14);
    CHECK(std::abs(u.h[n]) < 1e-14);
  }
  // psi = -A/(kx^2 + 4pi^2) cos(kx x1) cos(2pi x2): vertical averages by hand.
  const double A = 2.0, kx = kTwoPi / g.L, ky = kTwoPi, s = A / (kx * kx + ky * ky);
  const EnergyProfiles tg = energy_profiles(taylor_green(g, A));
  double err = 0.0;
  for (int i = 0; i < g.n1; ++i) {
    const auto n = std::size_t(i);
    const double c = std::cos(kx * g.x1(i)), sn = std::sin(kx * g.x1(i));
    const double e = 1.0 + 0.25 * s * s * (ky * ky * c * c + kx * kx * sn * sn);
    const double d = 0.5 * s * s * (c * c * (kx * kx * kx * kx + ky * ky * ky * ky) + 2.0 * kx * kx * ky * ky * sn * sn);
    err = std::max({err, std::abs(tg.e[n] - e), std::abs(tg.d[n] - d)});
  }
  CHECK(err < 1e-12);
}

TEST_CASE("trapezoid ledger is exact for linear-in-time profiles") {
  const Grid g{4.0, 16, 8};
  auto e = [&](double x, double t) { return 1.0 + 0.1 * std::cos(kTwoPi * x / g.L) + 0.3 * t; };
  EnergyLedger led(g, {{1.0, 3.0}});
  const std::vector<double> ts = {0.0, 0.1, 0.35, 0.4, 1.0};
  for (double t : ts) led.accumulate(synthetic(g, t, e), 1.0);
  const LedgerData& l = led.data();
  CHECK(l.samples == ts.size());
  CHECK(l.T == 1.0);
  for (int i = 0; i < g.n1; ++i) {
    const auto n = std::size_t(i);
    const double x = g.x1(i);
    CHECK(l.E[n] == doctest::Approx(1.0 + 0.1 * std::cos(kTwoPi * x / g.L) + 0.15).epsilon(1e-14));
    CHECK(l.D[n] == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(l.F[n] == doctest::Approx(0.25).epsilon(1e-14));
  }
  REQUIRE(l.windows.size() == 1);
  CHECK(l.windows[0].initial_energy == doctest::Approx(2.0 - 0.4 / std::numbers::pi).epsilon(1e-13));
  CHECK(l.series.size() == ts.size());
}

TEST_CASE("ledger rejects bad time stamps") {
  const Grid g{4.0, 16, 8};
  auto e = [](double, double) { return 1.0; };
  EnergyLedger a(g);
  CHECK_THROWS_AS(a.accumulate(synthetic(g, 0.5, e), 1.0), std::invalid_argument);
  EnergyLedger b(g);
  b.accumulate(synthetic(g, 0.0, e), 1.0);
  b.accumulate(synthetic(g, 0.2, e), 1.0);
  CHECK_THROWS_AS(b.accumulate(synthetic(g, 0.2, e), 1.0), std::invalid_argument);
  CHECK_THROWS_AS(b.accumulate(synthetic(g, 0.1, e), 1.0), std::invalid_argument);
  CHECK_THROWS_AS(b.accumulate(synthetic(Grid{4.0, 32, 8}, 0.3, e), 1.0), std::invalid_argument);
}

TEST_CASE("equilibrium ledger: E = e T, D = F = 0") {
  SimConfig cfg;
  cfg.grid = {10.0, 32, 16};
  cfg.dt = 0.01;
  cfg.T_final = 0.5;
  const double c = 1.7;
  const LedgerData l = ledger_of(cfg, uniform_flow(cfg.grid, c));
  CHECK(l.equilibrium());
  for (int i = 0; i < cfg.grid.n1; ++i) {
    const auto n = std::size_t(i);
    CHECK(l.E[n] == doctest::Approx((0.5 * c * c + 1.0) * 0.5).epsilon(1e-12));
    CHECK(l.D[n] == 0.0);
    CHECK(std::abs(l.F[n]) < 1e-14);
  }
  CHECK(balance_residual(l, 0.0, cfg.grid.L) < 1e-13);
}

TEST_CASE("Kolmogorov ledger against time integrals") {
  SimConfig cfg;
  cfg.grid = {8.0, 64, 16};
  cfg.dt = 1e-3;
  cfg.T_final = 1.0;
  const double U = 1.0;
  const KolmogorovOracle k{U, kTwoPi / cfg.grid.L};
  const LedgerData l = ledger_of(cfg, kolmogorov(cfg.grid, U), {{1.0, 5.0}});
  double err = 0.0;
  for (int i = 0; i < cfg.grid.n1; ++i) {
    const auto n = std::size_t(i);
    const double x = cfg.grid.x1(i);
    err = std::max({err, std::abs(l.E[n] - k.E(x, 1.0)), std::abs(l.D[n] - k.D(x, 1.0)),
                    std::abs(l.F[n] - k.F(x, 1.0)), std::abs(l.eT[n] - k.e(x, 1.0))});
  }
  CHECK(err < 1e-4);
  CHECK_FALSE(l.equilibrium());
  // Integral identity int_a^b (e(T) - e(0)) = F(b) - F(a) - D([a,b]) at T = 1.
  CHECK(balance_residual(l, 1.0, 5.0) < 1e-6);
  CHECK(balance_residual(l, 0.0, cfg.grid.L) < 1e-6);
}

TEST_CASE("balance residual converges at second order in dt") {
  SimConfig cfg;
  cfg.grid = {10.0, 48, 24};
  cfg.T_final = 0.2;
  Gen gen(11);
  const FlowState s = gen.band_limited(cfg.grid, 6.0, 0.3);
  std::vector<double> res;
  for (double dt : {0.004, 0.002, 0.001}) {
    cfg.dt = dt;
    res.push_back(balance_residual(ledger_of(cfg, s), 2.0, 7.0));
  }
  CHECK(res[2] < res[1]);
  CHECK(std::log2(res[0] / res[1]) >= 1.8);
  CHECK(std::log2(res[1] / res[2]) >= 1.8);
}

TEST_CASE("ledger invariants on random trajectories") {
  Gen gen(21);
  for (int n = 0; n < 5; ++n) {
    SimConfig cfg;
    cfg.grid = {gen.uniform(6.0, 14.0), 48, 24};
    cfg.dt = 2e-3;
    cfg.T_final = 0.1;
    const FlowState s = gen.band_limited(cfg.grid, gen.uniform(0.5, 4.0), gen.uniform(-1.0, 1.0));
    const LedgerData l = ledger_of(cfg, s);
    // Pointwise Cauchy-Schwarz in time and (d1 e)^2 <= 2 e d.
    for (int i = 0; i < cfg.grid.n1; ++i) {
      const auto k = std::size_t(i);
      CHECK(l.E[k] * l.E[k] <= l.T * l.EE2[k] * (1.0 + 1e-12));
      CHECK(l.D[k] >= 0.0);
      CHECK(l.E[k] >= l.T);
    }
    CHECK(l.de2_ed.value <= 2.0 * (1.0 + 1e-9));
    CHECK(l.E_star() <= std::sqrt(l.T) * l.EE_star() * (1.0 + 1e-12));
    for (std::size_t m = 1; m < l.series.size(); ++m) {
      CHECK(l.series.E_star[m] >= l.series.E_star[m - 1]);
      CHECK(l.series.sup_d[m] >= l.series.sup_d[m - 1]);
    }
    CHECK(l.m2_minus_4e.value <= 0.0 + 2.0 * 0.25 * std::pow(l.series.omega_sup.front(), 2) + 1e-12);
    const SnappedWindow w = snap_window(l.grid, 1.0, 4.0);
    const double gap = available_energy(l, 1.0, 4.0) - dissipated_energy(l, 1.0, 4.0) - window_integral(l.eT, w.xa, w.xb);
    CHECK(std::abs(gap) == doctest::Approx(balance_residual(l, 1.0, 4.0)).epsilon(1e-9));
  }
}

TEST_CASE("windows snap to the grid and are validated") {
  const Grid g{8.0, 32, 8};
  const SnappedWindow w = snap_window(g, 1.1, 3.9);
  CHECK(w.xa == doctest::Approx(1.0));
  CHECK(w.xb == doctest::Approx(4.0));
  CHECK(snap_window(g, 0.0, 8.0).ib == g.n1);
  CHECK_THROWS_AS(snap_window(g, 3.0, 3.0), std::invalid_argument);
  CHECK_THROWS_AS(snap_window(g, 5.0, 3.0), std::invalid_argument);
  CHECK_THROWS_AS(snap_window(g, -1.0, 3.0), std::invalid_argument);
  CHECK_THROWS_AS(snap_window(g, 1.0, 9.0), std::invalid_argument);
  CHECK_THROWS_AS(snap_window(g, 1.0, 1.1), std::invalid_argument);
}
