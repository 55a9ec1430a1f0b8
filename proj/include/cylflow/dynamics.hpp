#pragma once

// Time integration of the vorticity equation d_t omega + u.grad omega = Lap omega
// with the mean-flow offset m0 held fixed. Integrating-factor Runge-Kutta: the
// Laplacian is integrated exactly per mode, advection explicitly.

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "cylflow/flow.hpp"
#include "cylflow/spectral.hpp"

namespace cylflow {

enum class Scheme { rk2, rk4 };

struct InitialCondition {
  std::string kind = "taylor_green";
  std::map<std::string, double> params;
  std::uint64_t seed = 0;

  [[nodiscard]] double param(const std::string& key, double fallback) const {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
  }
};

struct SimConfig {
  Grid grid;
  double dt = 1e-3;
  double T_final = 1.0;
  double cfl_safety = 0.5;
  bool dealias = true;
  Scheme scheme = Scheme::rk2;
  InitialCondition initial_condition;
  double snapshot_interval = 0.0;  // 0: initial and final snapshots only
  std::vector<double> checkpoints;  // times the integration must land on exactly

  void validate() const {
    grid.validate();
    if (!(dt > 0.0)) throw std::invalid_argument("config: time.dt must be positive");
    if (!(T_final > 0.0)) throw std::invalid_argument("config: time.T must be positive");
    if (!(cfl_safety > 0.0 && cfl_safety <= 1.0)) throw std::invalid_argument("config: time.cfl_safety must lie in (0,1]");
  }
};

class CflViolation : public std::runtime_error {
 public:
  CflViolation(double admissible, double requested)
      : std::runtime_error("CFL violation: dt=" + std::to_string(requested) + " exceeds admissible " +
                           std::to_string(admissible)),
        admissible_dt(admissible) {}
  double admissible_dt;
};

// --- scenarios ----------------------------------------------------------------

namespace detail {

inline SpectralField finish_initial_vorticity(SpectralField w) {
  w(0, 0) = Complex{};
  return dealias(std::move(w));
}

inline double gaussian(double x, double c, double w) {
  const double s = (x - c) / w;
  return std::exp(-0.5 * s * s);
}

}  // namespace detail

// omega = A cos(2 pi k x1 / L) cos(2 pi x2): the streamfunction is proportional
// to omega, so advection vanishes and every mode decays at exp(-|k|^2 t).
inline FlowState taylor_green(const Grid& g, double A, int k = 1, double m0 = 0.0) {
  const double kx = kTwoPi * k / g.L;
  return {RealField::sample(g, [&](double x1, double x2) { return A * std::cos(kx * x1) * std::cos(kTwoPi * x2); }), m0,
          0.0};
}

// u = (0, U sin(2 pi k x1 / L)), a steady shear profile decaying by diffusion.
inline FlowState kolmogorov(const Grid& g, double U, int k = 1) {
  const double kx = kTwoPi * k / g.L;
  return {RealField::sample(g, [&](double x1, double) { return U * kx * std::cos(kx * x1); }), 0.0, 0.0};
}

inline FlowState uniform_flow(const Grid& g, double c) { return {RealField(g), c, 0.0}; }

struct RandomBandLimited {
  double amplitude = 1.0;  // sup of the resulting vorticity samples
  int k1_max = 4;          // horizontal mode cutoff, in multiples of the base wavenumber 2 pi / cell
  double cell = 0.0;       // base wavelength; <= 0 means the box length L
  int k2_max = 2;          // vertical mode cutoff
  double envelope_width = 0.0;  // > 0: Gaussian localization around `center`
  double center = -1.0;         // < 0: box center
  double m0 = 0.0;
  std::uint64_t seed = 1;
};

inline FlowState random_band_limited(const Grid& g, const RandomBandLimited& spec) {
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int q = spec.cell > 0.0 ? std::max(1, int(std::lround(g.L / spec.cell))) : 1;
  if (q * spec.k1_max >= g.n1 / 2) throw std::invalid_argument("random_band_limited: k1_max exceeds the grid");
  SpectralField w(g);
  for (int i = 0; i < g.n1; ++i) {
    const int kb = g.k1_index(i);
    if (kb % q != 0) continue;
    const int k1 = kb / q;
    if (std::abs(k1) > spec.k1_max || i == g.n1 / 2) continue;
    for (int j = 0; j <= std::min(spec.k2_max, g.n2 / 2 - 1); ++j) {
      const double decay = 1.0 / (1.0 + double(k1 * k1 + j * j));
      w(i, j) = decay * Complex(normal(rng), normal(rng));
    }
  }
  // Row j = 0 must be Hermitian on its own.
  for (int i = 1; i < g.n1 / 2; ++i) w(g.n1 - i, 0) = std::conj(w(i, 0));
  w(0, 0) = Complex{};
  RealField field = inverse_transform(w);
  if (spec.envelope_width > 0.0) {
    const double c = spec.center < 0.0 ? g.L / 2.0 : spec.center;
    for (int i = 0; i < g.n1; ++i) {
      const double env = detail::gaussian(g.x1(i), c, spec.envelope_width);
      for (int j = 0; j < g.n2; ++j) field(i, j) *= env;
    }
  }
  RealField omega = inverse_transform(detail::finish_initial_vorticity(transform(field)));
  const double peak = omega.max_abs();
  if (peak > 0.0) omega = (spec.amplitude / peak) * std::move(omega);
  return {std::move(omega), spec.m0, 0.0};
}

struct ShearPulse {
  double U = 1.0;           // amplitude of the mean vertical flow
  double width = 16.0;      // Gaussian envelope width
  double wavelength = 24.0;  // carrier wavelength of the mean flow
  double osc = 0.0;         // amplitude of the oscillating (k2 = 1) vorticity
  double center = -1.0;     // < 0: box center
};

// Horizontally localized shear: m(x1) = U g(x1) cos(2 pi (x1-c)/lambda) with a
// Gaussian envelope g, plus an optional vertically oscillating vorticity
// component under the same envelope.
inline FlowState shear_pulse(const Grid& g, const ShearPulse& spec) {
  const double c = spec.center < 0.0 ? g.L / 2.0 : spec.center;
  Profile m(g);
  for (int i = 0; i < g.n1; ++i) {
    const double x = g.x1(i);
    m[std::size_t(i)] = spec.U * detail::gaussian(x, c, spec.width) * std::cos(kTwoPi * (x - c) / spec.wavelength);
  }
  const Profile dm = derivative(m);
  double m0 = 0.0;
  for (double v : m.values) m0 += v;
  m0 /= double(g.n1);
  RealField omega = RealField::sample(g, [&](double x1, double x2) {
    return spec.osc * detail::gaussian(x1, c, spec.width) * std::cos(kTwoPi * x2);
  });
  for (int i = 0; i < g.n1; ++i)
    for (int j = 0; j < g.n2; ++j) omega(i, j) += dm[std::size_t(i)];
  omega = inverse_transform(detail::finish_initial_vorticity(transform(omega)));
  return {std::move(omega), m0, 0.0};
}

inline FlowState make_initial_state(const Grid& g, const InitialCondition& ic) {
  if (ic.kind == "taylor_green") return taylor_green(g, ic.param("A", 1.0), int(ic.param("k", 1)), ic.param("m0", 0.0));
  if (ic.kind == "kolmogorov") return kolmogorov(g, ic.param("U", 1.0), int(ic.param("k", 1)));
  if (ic.kind == "uniform") return uniform_flow(g, ic.param("c", 0.0));
  if (ic.kind == "random_band_limited") {
    RandomBandLimited r;
    r.amplitude = ic.param("amplitude", 1.0);
    r.k1_max = int(ic.param("k1_max", 4));
    r.k2_max = int(ic.param("k2_max", 2));
    r.cell = ic.param("cell", 0.0);
    r.envelope_width = ic.param("envelope_width", 0.0);
    r.center = ic.param("center", -1.0);
    r.m0 = ic.param("m0", 0.0);
    r.seed = ic.seed;
    return random_band_limited(g, r);
  }
  if (ic.kind == "shear_pulse") {
    ShearPulse s;
    s.U = ic.param("U", 1.0);
    s.width = ic.param("width", 16.0);
    s.wavelength = ic.param("wavelength", 24.0);
    s.osc = ic.param("osc", 0.0);
    s.center = ic.param("center", -1.0);
    return shear_pulse(g, s);
  }
  throw std::invalid_argument("unknown initial condition kind '" + ic.kind + "'");
}

// --- right-hand side -------------------------------------------------------

// Spectral u.grad(omega); the physical-space product is dealiased when asked.
inline SpectralField advection_spectral(const SpectralField& omega_hat, double m0, bool dealiased = true) {
  const VelocitySpectra v = velocity_spectra(omega_hat, m0);
  const RealField u1 = inverse_transform(v.u1);
  const RealField u2 = inverse_transform(v.u2);
  const RealField w1 = inverse_transform(derivative(omega_hat, Axis::horizontal));
  const RealField w2 = inverse_transform(derivative(omega_hat, Axis::vertical));
  RealField adv(omega_hat.grid);
  for (std::size_t n = 0; n < adv.values.size(); ++n)
    adv.values[n] = u1.values[n] * w1.values[n] + u2.values[n] * w2.values[n];
  SpectralField out = transform(adv);
  return dealiased ? dealias(std::move(out)) : out;
}

inline RealField nonlinear_term(const FlowState& state, bool dealiased = true) {
  return inverse_transform(advection_spectral(transform(state.omega), state.m0, dealiased));
}

// Largest dt allowed by the advective CFL condition for the given velocity.
inline double admissible_dt(const Grid& g, double u1_max, double u2_max, double cfl_safety) {
  const double rate = u1_max / g.dx1() + u2_max / g.dx2();
  return rate > 0.0 ? cfl_safety / rate : std::numeric_limits<double>::infinity();
}

struct StepOptions {
  bool nonlinear = true;
  bool dealias = true;
  Scheme scheme = Scheme::rk2;
  double cfl_safety = 1.0;
};

// Stateless integrating-factor stepper in spectral space.
class Stepper {
 public:
  explicit Stepper(StepOptions opts = {}) : opts_(opts) {}

  [[nodiscard]] SpectralField step(const SpectralField& w, double m0, double dt) const {
    check_cfl(w, m0, dt);
    const Grid& g = w.grid;
    SpectralField E(g), Eh(g);
    for (int i = 0; i < g.n1; ++i)
      for (int j = 0; j < g.n2_half(); ++j) {
        const double k2 = g.k1(i) * g.k1(i) + g.k2(j) * g.k2(j);
        E(i, j) = std::exp(-k2 * dt);
        Eh(i, j) = std::exp(-0.5 * k2 * dt);
      }
    if (!opts_.nonlinear) return mul(E, w);
    if (opts_.scheme == Scheme::rk2) {
      // Heun on v = e^{|k|^2 t} omega.
      const SpectralField n0 = rhs(w, m0);
      const SpectralField stage = mul(E, axpy(w, dt, n0));
      const SpectralField n1 = rhs(stage, m0);
      SpectralField out(g);
      for (std::size_t n = 0; n < out.coeffs.size(); ++n)
        out.coeffs[n] = E.coeffs[n] * w.coeffs[n] + 0.5 * dt * (E.coeffs[n] * n0.coeffs[n] + n1.coeffs[n]);
      return out;
    }
    // Lawson RK4.
    const SpectralField k1 = rhs(w, m0);
    const SpectralField k2 = rhs(mul(Eh, axpy(w, 0.5 * dt, k1)), m0);
    const SpectralField k3 = rhs(axpy(mul(Eh, w), 0.5 * dt, k2), m0);
    const SpectralField k4 = rhs(axpy(mul(E, w), dt, mul(Eh, k3)), m0);
    SpectralField out(g);
    for (std::size_t n = 0; n < out.coeffs.size(); ++n)
      out.coeffs[n] = E.coeffs[n] * w.coeffs[n] +
                      dt / 6.0 *
                          (E.coeffs[n] * k1.coeffs[n] + 2.0 * Eh.coeffs[n] * (k2.coeffs[n] + k3.coeffs[n]) + k4.coeffs[n]);
    return out;
  }

  void check_cfl(const SpectralField& w, double m0, double dt) const {
    if (!opts_.nonlinear) return;
    const VelocitySpectra v = velocity_spectra(w, m0);
    const double adm = admissible_dt(w.grid, inverse_transform(v.u1).max_abs(), inverse_transform(v.u2).max_abs(),
                                     opts_.cfl_safety);
    if (dt > adm) throw CflViolation(adm, dt);
  }

  [[nodiscard]] const StepOptions& options() const { return opts_; }

 private:
  [[nodiscard]] SpectralField rhs(const SpectralField& w, double m0) const {
    SpectralField a = advection_spectral(w, m0, opts_.dealias);
    for (Complex& c : a.coeffs) c = -c;
    return a;
  }
  static SpectralField mul(const SpectralField& a, SpectralField b) {
    for (std::size_t n = 0; n < b.coeffs.size(); ++n) b.coeffs[n] *= a.coeffs[n];
    return b;
  }
  static SpectralField axpy(SpectralField y, double a, const SpectralField& x) {
    for (std::size_t n = 0; n < y.coeffs.size(); ++n) y.coeffs[n] += a * x.coeffs[n];
    return y;
  }

  StepOptions opts_;
};

inline FlowState step(const FlowState& state, double dt, const StepOptions& opts = {}) {
  const SpectralField w = Stepper(opts).step(transform(state.omega), state.m0, dt);
  return {inverse_transform(w), state.m0, state.t + dt};
}

// --- orchestration ------------------------------------------------------------

enum class RunStatus { completed, cfl_abort, nan_abort };

inline const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::completed: return "completed";
    case RunStatus::cfl_abort: return "cfl_abort";
    case RunStatus::nan_abort: return "nan_abort";
  }
  return "?";
}

struct Trajectory {
  std::vector<FlowState> snapshots;
  std::vector<double> times;       // every accepted step, starting at 0
  std::vector<double> omega_sup;   // ||omega(t)||_inf at each entry of `times`
  RunStatus status = RunStatus::completed;
  std::string message;
  int steps = 0;
};

// What a diagnostic sink sees after each accepted step (and once at t = 0).
struct StepView {
  const FlowState& state;
  const SpectralField& omega_hat;
  double dt;  // step just taken, 0 for the initial call
  int step;
  double omega_sup;
};

using DiagnosticSink = std::function<void(const StepView&)>;

inline Trajectory run(const SimConfig& config, const FlowState& initial, const DiagnosticSink& sink = {}) {
  config.validate();
  require_same_grid(config.grid, initial.omega.grid, "run");
  const Stepper stepper({true, config.dealias, config.scheme, config.cfl_safety});
  Trajectory traj;

  SpectralField w = transform(initial.omega);
  require_zero_circulation(w);
  FlowState state = initial;
  state.t = 0.0;

  auto record = [&](double dt_taken) {
    const double sup = sup_norm(w, state.omega);
    traj.times.push_back(state.t);
    traj.omega_sup.push_back(sup);
    if (sink) sink(StepView{state, w, dt_taken, traj.steps, sup});
  };
  record(0.0);
  traj.snapshots.push_back(state);

  std::vector<double> targets;
  for (double c : config.checkpoints)
    if (c > 0.0 && c < config.T_final) targets.push_back(c);
  if (config.snapshot_interval > 0.0)
    for (double s = config.snapshot_interval; s < config.T_final; s += config.snapshot_interval) targets.push_back(s);
  targets.push_back(config.T_final);
  std::sort(targets.begin(), targets.end());
  targets.erase(std::unique(targets.begin(), targets.end(),
                            [](double a, double b) { return std::abs(a - b) < 1e-12 * std::max(1.0, std::abs(b)); }),
                targets.end());

  double dt_nominal = config.dt;
  constexpr int kMaxRetries = 8;
  for (double target : targets) {
    while (state.t < target) {
      const double remaining = target - state.t;
      // Uniform steps that land exactly on the target.
      double dt = remaining / std::ceil(remaining / dt_nominal - 1e-9);
      SpectralField next;
      int retries = 0;
      for (;;) {
        try {
          next = stepper.step(w, state.m0, dt);
          break;
        } catch (const CflViolation& e) {
          if (++retries > kMaxRetries) {
            traj.status = RunStatus::cfl_abort;
            traj.message = e.what();
            traj.snapshots.push_back(state);
            return traj;
          }
          dt_nominal /= 2.0;
          dt = remaining / std::ceil(remaining / dt_nominal - 1e-9);
        }
      }
      w = std::move(next);
      flush_negligible(w);
      state.omega = inverse_transform(w);
      state.t = (dt == remaining) ? target : state.t + dt;
      ++traj.steps;
      if (!state.omega.all_finite()) {
        traj.status = RunStatus::nan_abort;
        traj.message = "non-finite vorticity at t=" + std::to_string(state.t);
        return traj;
      }
      record(dt);
    }
    auto on_multiple = [&](double t, double step) {
      return step > 0.0 && std::abs(t - step * std::round(t / step)) < 1e-9 * std::max(1.0, t);
    };
    const bool is_snapshot = on_multiple(target, config.snapshot_interval) ||
                             std::abs(target - config.T_final) < 1e-12 * std::max(1.0, config.T_final);
    if (is_snapshot) traj.snapshots.push_back(state);
  }
  return traj;
}

inline Trajectory run(const SimConfig& config, const DiagnosticSink& sink = {}) {
  return run(config, make_initial_state(config.grid, config.initial_condition), sink);
}

}  // namespace cylflow
