#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>

#include "support.hpp"

using namespace cylflow;
using namespace testing_support;

TEST_CASE("kernel K values and symmetry") {
  CHECK(kernel_K(0.0, 0.5) == doctest::Approx(std::log(2.0) / (2.0 * std::numbers::pi)).epsilon(1e-14));
  CHECK(std::abs(kernel_K(5.0, 0.25) - 2.5) < 1e-10);
  CHECK(std::abs(kernel_K(12.0, 0.3) - 6.0) < 1e-10);
  CHECK_THROWS_AS(kernel_K(0.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(kernel_K(0.0, 1.0), std::domain_error);
  Gen gen(3);
  for (int n = 0; n < 200; ++n) {
    const double x1 = gen.uniform(-15.0, 15.0), x2 = gen.uniform(0.01, 0.99);
    const double k = kernel_K(x1, x2);
    CHECK(kernel_K(-x1, x2) == doctest::Approx(k).epsilon(1e-13));
    CHECK(kernel_K(x1, -x2) == doctest::Approx(k).epsilon(1e-13));
  }
}

TEST_CASE("kernel derivatives against finite differences; d2K vanishes at x2 = 0, 1/2") {
  Gen gen(4);
  const double h = 1e-6;
  for (int n = 0; n < 100; ++n) {
    const double x1 = gen.uniform(-3.0, 3.0), x2 = gen.uniform(0.05, 0.95);
    if (std::abs(x1) < 0.05) continue;
    const KernelGradient gk = kernel_gradient(x1, x2);
    CHECK(gk.d1 == doctest::Approx((kernel_K(x1 + h, x2) - kernel_K(x1 - h, x2)) / (2 * h)).epsilon(1e-6));
    CHECK(gk.d2 == doctest::Approx((kernel_K(x1, x2 + h) - kernel_K(x1, x2 - h)) / (2 * h)).epsilon(1e-6));
    const double s = x1 > 0 ? 1.0 : -1.0;
    CHECK(kernel_bar_d1(x1, x2) == doctest::Approx(gk.d1 - 0.5 * s).epsilon(1e-9));
    CHECK(kernel_gradient(x1, 0.0).d2 == doctest::Approx(0.0));
    CHECK(kernel_gradient(x1, 0.5).d2 == doctest::Approx(0.0));
  }
}

TEST_CASE("kernel L1 norms match their closed forms and are stable under refinement") {
  // int |d2K| dx2 = (1/pi) log coth(pi |x1|)  => ||d2K||_1 = 1/4.
  // d1Kbar = Re(z/(1-z)), z = e^{-2pi|x1| + i 2pi x2}  => ||d1Kbar||_1 = ln 2 / pi.
  const KernelConstants k = compute_kernel_constants({});
  CHECK(k.norm_d2K == doctest::Approx(0.25).epsilon(1e-6));
  CHECK(k.norm_d1Kbar == doctest::Approx(std::log(2.0) / std::numbers::pi).epsilon(1e-6));
  CHECK(k.refinement_change < 5e-3);
  const QuadratureSpec fine = QuadratureSpec{}.doubled();
  CHECK(std::abs(l1_norm_d2K(fine) - l1_norm_d2K(fine.doubled())) / k.norm_d2K < 5e-3);
  CHECK(k.C1 > 0.0);
  CHECK(k.C2 > 0.0);
  CHECK(k.C1 == doctest::Approx(2.0 * std::max(k.norm_d2K, k.norm_d1Kbar)));
  CHECK(k.C2 == doctest::Approx(k.C1 * k.C1 + 2.0 * k.norm_d2K * k.C1));
  CHECK_THROWS_AS(compute_kernel_constants({5.0, 8, 8}), std::invalid_argument);
  CHECK_THROWS_AS(require_converged(0.25, 0.26, 0.22, 0.22), QuadratureError);
  CHECK_THROWS_AS(require_converged(0.25, 0.25, 0.22, std::nan("")), QuadratureError);
  CHECK(require_converged(0.25, 0.2501, 0.22, 0.22) < 5e-3);
}

TEST_CASE("velocity reconstruction closed forms") {
  SUBCASE("omega = 0, m0 = c gives u = (0, c)") {
    const Grid g{8.0, 16, 16};
    const VelocityField u = reconstruct_velocity({RealField(g), 1.75, 0.0});
    CHECK(u.u1.max_abs() == 0.0);
    for (double v : u.u2.values) CHECK(v == 1.75);
  }
  SUBCASE("omega = -2 pi cos(2 pi x2) gives u = (sin(2 pi x2), 0)") {
    const Grid g{8.0, 16, 32};
    const RealField w = RealField::sample(g, [](double, double x2) { return -kTwoPi * std::cos(kTwoPi * x2); });
    const VelocityField u = reconstruct_velocity({w, 0.0, 0.0});
    CHECK(max_abs_diff(u.u1, RealField::sample(g, [](double, double x2) { return std::sin(kTwoPi * x2); })) < 1e-10);
    CHECK(u.u2.max_abs() < 1e-10);
  }
  SUBCASE("Kolmogorov vorticity inverts to the shear profile") {
    const Grid g{8.0, 64, 8};
    const VelocityField u = reconstruct_velocity(kolmogorov(g, 1.3));
    CHECK(u.u1.max_abs() < 1e-12);
    CHECK(max_abs_diff(u.u2, RealField::sample(g, [&](double x1, double) {
            return 1.3 * std::sin(kTwoPi * x1 / g.L);
          })) < 1e-10);
  }
  SUBCASE("nonzero circulation is refused") {
    const Grid g{8.0, 16, 16};
    const RealField w = RealField::sample(g, [](double, double) { return 1.0; });
    CHECK_THROWS_AS(reconstruct_velocity({w, 0.0, 0.0}), CirculationError);
  }
}

TEST_CASE("structural identities on 100 random band-limited states") {
  Gen gen(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const Grid g{gen.uniform(4.0, 24.0), 48, 48};
    const FlowState s = gen.band_limited(g, gen.uniform(0.1, 5.0), gen.uniform(-2.0, 2.0));
    const SpectralField wh = transform(s.omega);
    const VelocitySpectra vs = velocity_spectra(wh, s.m0);
    const VelocityField u = velocity_from_spectra(vs);
    const double scale = std::max(1.0, s.omega.max_abs());

    CHECK(spectral_div(u).max_abs() <= 1e-10 * scale);
    double mean_u1 = 0.0;
    for (double v : vertical_mean(u.u1).values) mean_u1 = std::max(mean_u1, std::abs(v));
    CHECK(mean_u1 <= 1e-10 * scale);
    CHECK(max_abs_diff(inverse_transform(curl(vs)), s.omega) <= 1e-8 * scale);

    // Riesz: d1 u2_hat equals (k1^2/|k|^2) omega_hat on oscillating modes.
    SpectralField riesz(g);
    for (int i = 0; i < g.n1; ++i)
      for (int j = 1; j < g.n2_half(); ++j) {
        const double k1 = g.k1(i), k2 = g.k2(j);
        riesz(i, j) = k1 * k1 / (k1 * k1 + k2 * k2) * wh(i, j);
      }
    SpectralField u2_osc = vs.u2;
    for (int i = 0; i < g.n1; ++i) u2_osc(i, 0) = Complex{};
    CHECK(max_abs_diff(inverse_transform(derivative(u2_osc, Axis::horizontal)), inverse_transform(riesz)) <= 1e-8 * scale);

    const double uscale = std::max(1.0, u.u2.max_abs() * u.u2.max_abs() * 40.0);
    CHECK(uid_residual(u, s.omega).max_abs() <= 1e-6 * uscale);
    // -Lap p = div((u.grad)u).
    const RealField p = pressure_field(u, s.omega);
    const RealField a1 = u.u1 * derivative(u.u1, Axis::horizontal) + u.u2 * derivative(u.u1, Axis::vertical);
    const RealField a2 = u.u1 * derivative(u.u2, Axis::horizontal) + u.u2 * derivative(u.u2, Axis::vertical);
    const RealField div = derivative(a1, Axis::horizontal) + derivative(a2, Axis::vertical);
    CHECK(max_abs_diff(inverse_transform(laplacian(transform(p))), -1.0 * div) <= 1e-6 * uscale);
  }
}

TEST_CASE("reconstruction is linear in (omega, m0)") {
  Gen gen(17);
  const Grid g{10.0, 32, 32};
  const FlowState a = gen.band_limited(g, 1.0, 0.3), b = gen.band_limited(g, 2.0, -1.1);
  const double alpha = 0.7, beta = -1.9;
  const VelocityField ua = reconstruct_velocity(a), ub = reconstruct_velocity(b);
  const VelocityField uc = reconstruct_velocity({alpha * a.omega + beta * b.omega, alpha * a.m0 + beta * b.m0, 0.0});
  CHECK(max_abs_diff(uc.u1, alpha * ua.u1 + beta * ub.u1) < 1e-12);
  CHECK(max_abs_diff(uc.u2, alpha * ua.u2 + beta * ub.u2) < 1e-12);
}

TEST_CASE("pressure closed forms") {
  const Grid g{8.0, 32, 16};
  const FlowState eq = uniform_flow(g, 2.0);
  CHECK(pressure_field(reconstruct_velocity(eq), eq.omega).max_abs() == 0.0);
  const FlowState kol = kolmogorov(g, 1.0);
  CHECK(pressure_field(reconstruct_velocity(kol), kol.omega).max_abs() < 1e-14);
}

TEST_CASE("spectral Biot-Savart agrees with direct kernel quadrature") {
  // omega_hat = exp(-(x1-c)^2) cos(2 pi x2) sin(2 pi x2 + x1/2)-type smooth
  // oscillating field; the quadrature subtracts omega_hat(x), which is legal
  // because d2K is odd in x2 and d1Kbar odd in x1 on symmetric domains.
  const double c = 10.0;
  auto wfun = [&](double x1, double x2) {
    return std::exp(-(x1 - c) * (x1 - c)) * (std::cos(kTwoPi * x2) + 0.5 * std::sin(2.0 * kTwoPi * x2 + 0.3 * x1));
  };
  const Grid g{20.0, 256, 64};
  const FlowState s{RealField::sample(g, wfun), 0.0, 0.0};
  const VelocityField u = reconstruct_velocity(s);

  const double W = 9.0, h1 = 1.0 / 160.0, h2 = 1.0 / 160.0;
  const int n1 = int(std::lround(2 * W / h1)), n2 = int(std::lround(1.0 / h2));
  for (const auto& [i, j] : std::vector<std::pair<int, int>>{{128, 5}, {120, 17}, {140, 40}, {100, 0}, {150, 33}}) {
    const double x1 = g.x1(i), x2 = g.x2(j);
    const double w0 = wfun(x1, x2);
    double q1 = 0.0, q2 = 0.0;
    for (int a = -n1 / 2; a <= n1 / 2; ++a) {
      const double r1 = a * h1;
      const double wt = (a == -n1 / 2 || a == n1 / 2) ? 0.5 : 1.0;
      for (int b = -n2 / 2; b < n2 / 2; ++b) {
        if (a == 0 && b == 0) continue;
        const double r2 = b * h2;
        const double dw = wfun(x1 - r1, x2 - r2) - w0;
        q1 -= wt * kernel_gradient(r1, r2).d2 * dw;
        q2 += wt * kernel_bar_d1(r1, r2) * dw;
      }
    }
    q1 *= h1 * h2;
    q2 *= h1 * h2;
    CHECK(std::abs(q1 - u.uhat1(i, j)) < 1e-4);
    CHECK(std::abs(q2 - u.uhat2(i, j)) < 1e-4);
  }
}

TEST_CASE("velocity and pressure bounds hold on 100 random states") {
  const KernelConstants k = compute_kernel_constants({});
  Gen gen(99);
  int passes = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const Grid g{gen.uniform(4.0, 24.0), 48, 32};
    const FlowState s = gen.band_limited(g, gen.uniform(0.1, 10.0), gen.uniform(-3.0, 3.0));
    const auto r = check_velocity_bounds(reconstruct_velocity(s), s.omega, s.omega.max_abs(), k);
    passes += (r[0].verdict == Verdict::pass && r[1].verdict == Verdict::pass);
  }
  CHECK(passes == 100);
  const Grid g{8.0, 16, 16};
  const auto z = check_velocity_bounds(reconstruct_velocity(uniform_flow(g, 0.0)), RealField(g), 1.0, k);
  CHECK(z[0].verdict == Verdict::pass);
  CHECK(z[0].lhs == 0.0);
  CHECK(z[1].lhs == 0.0);
}
