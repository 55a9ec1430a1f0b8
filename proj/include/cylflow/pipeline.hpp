#pragma once

// run -> diagnostics -> ledger, with checkpoint copies of the ledger.

#include <cmath>
#include <functional>
#include <vector>

#include "cylflow/bounds.hpp"
#include "cylflow/config.hpp"
#include "cylflow/dynamics.hpp"
#include "cylflow/energetics.hpp"
#include "cylflow/equilibria.hpp"

namespace cylflow {

struct Checkpoint {
  double T = 0.0;
  LedgerData ledger;
};

struct RunResult {
  Trajectory trajectory;
  std::vector<Checkpoint> checkpoints;  // ascending in T, the last one at the final time reached
  std::vector<EnergyProfiles> profiles;  // at the output cadence, plus t = 0 and the final time
  DistanceSeries distance;
  double M = 0.0;
  Constants constants;

  [[nodiscard]] const LedgerData& final_ledger() const { return checkpoints.back().ledger; }
};

inline bool near_time(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); }

// The vorticity bound: configured, else sup |omega(.,0)|, else 1 for omega = 0
// (any M >= ||omega|| is admissible).
inline double vorticity_bound(const AppConfig& cfg, double omega_sup0) {
  if (cfg.M) return *cfg.M;
  return omega_sup0 > 0.0 ? omega_sup0 : 1.0;
}

inline RunResult simulate(const AppConfig& cfg, const FlowState& initial, const KernelConstants& kernel,
                          const std::function<void(const StepView&)>& progress = {}) {
  const SimConfig& sim = cfg.sim;
  RunResult res;
  EnergyLedger ledger(sim.grid, cfg.windows);
  res.distance.R = cfg.dist_R;
  std::vector<double> cps;
  for (double c : sim.checkpoints)
    if (c > 0.0 && c < sim.T_final) cps.push_back(c);
  std::sort(cps.begin(), cps.end());
  std::size_t next_cp = 0;

  auto sink = [&](const StepView& v) {
    const Diagnostics dg = diagnose(v.omega_hat, v.state.m0, v.state.t, &v.state.omega);
    ledger.accumulate(dg.profiles, v.omega_sup);
    res.distance.record(v.state.t, dg.velocity);
    const double t = v.state.t;
    bool keep = v.step == 0 || near_time(t, sim.T_final);
    if (sim.snapshot_interval > 0.0) {
      const double k = std::round(t / sim.snapshot_interval);
      keep = keep || near_time(t, k * sim.snapshot_interval);
    }
    if (keep) res.profiles.push_back(dg.profiles);
    while (next_cp < cps.size() && (near_time(t, cps[next_cp]) || t > cps[next_cp])) {
      res.checkpoints.push_back({t, ledger.data()});
      ++next_cp;
    }
    if (progress) progress(v);
  };
  res.trajectory = run(sim, initial, sink);
  if (res.checkpoints.empty() || !near_time(res.checkpoints.back().T, ledger.T()))
    res.checkpoints.push_back({ledger.T(), ledger.data()});
  res.M = vorticity_bound(cfg, res.trajectory.omega_sup.empty() ? 0.0 : res.trajectory.omega_sup.front());
  res.constants = derive_constants(kernel, res.M);
  return res;
}

inline RunResult simulate(const AppConfig& cfg, const KernelConstants& kernel,
                          const std::function<void(const StepView&)>& progress = {}) {
  return simulate(cfg, make_initial_state(cfg.sim.grid, cfg.sim.initial_condition), kernel, progress);
}

inline CheckOptions check_options(const AppConfig& cfg) { return {cfg.windows, cfg.dissipation_R}; }

}  // namespace cylflow
