#pragma once

// The four subcommands behind the cylflow executable. Each returns a process
// exit code: 0 pass, 1 check failure, 2 input error, 3 numerical abort.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "cylflow/bounds.hpp"
#include "cylflow/config.hpp"
#include "cylflow/equilibria.hpp"
#include "cylflow/io.hpp"
#include "cylflow/pipeline.hpp"

namespace cylflow {

enum ExitCode { kPass = 0, kCheckFailure = 1, kInputError = 2, kNumericalAbort = 3 };

namespace fs = std::filesystem;

inline KernelConstants kernel_constants_for(const AppConfig& cfg) { return compute_kernel_constants(cfg.quad); }

// constants.json: kernel norms, C1, C2 and the derived framework constants.
inline json constants_document(const KernelConstants& k, const Constants& c) {
  return json{{"version", kVersion}, {"kernel", to_json(k)}, {"constants", to_json(c)}};
}

inline int cmd_constants(const AppConfig& cfg, const fs::path& out_dir, bool quiet = false) {
  double omega_sup0 = 0.0;
  if (!cfg.M) {
    const FlowState s = make_initial_state(cfg.sim.grid, cfg.sim.initial_condition);
    omega_sup0 = sup_norm(transform(s.omega), s.omega);
  }
  const double M = vorticity_bound(cfg, omega_sup0);
  if (!(M > 0.0)) throw ConfigError("constants: M must be positive");
  const KernelConstants k = kernel_constants_for(cfg);
  const Constants c = derive_constants(k, M);
  fs::create_directories(out_dir);
  write_json(out_dir / "constants.json", constants_document(k, c));
  if (!quiet)
    std::cerr << "C1=" << format_double(k.C1) << " C2=" << format_double(k.C2) << " beta=" << format_double(c.beta)
              << " kappa=" << format_double(c.kappa) << "\n";
  return kPass;
}

struct RunFiles {
  std::vector<std::string> names;
  void add(const std::string& n) { names.push_back(n); }
};

inline json inventory(const fs::path& dir, const std::vector<std::string>& names) {
  json files = json::array();
  for (const auto& n : names)
    files.push_back({{"path", n}, {"sha256", sha256_file(dir / n)}, {"bytes", fs::file_size(dir / n)}});
  return files;
}

// Writes every run output into `dir`, returning the names written.
inline std::vector<std::string> write_run_outputs(const fs::path& dir, const AppConfig& cfg, const KernelConstants& k,
                                                  const RunResult& res) {
  std::vector<std::string> names;
  write_text(dir / "config.txt", echo_config(cfg));
  names.push_back("config.txt");
  write_json(dir / "constants.json", constants_document(k, res.constants));
  names.push_back("constants.json");

  const LedgerData& fin = res.final_ledger();
  write_csv(dir / "series.csv", series_table(fin.series));
  names.push_back("series.csv");

  Table dist;
  dist.header = {"t", "d_R", "m_star"};
  dist.columns = {res.distance.t, res.distance.d_R, res.distance.m_star};
  write_csv(dir / "distance.csv", dist);
  names.push_back("distance.csv");

  Table prof;
  prof.header = {"t", "x1", "e", "h", "d", "f", "m"};
  prof.columns.assign(7, {});
  for (const auto& p : res.profiles)
    for (int i = 0; i < cfg.sim.grid.n1; ++i) {
      const auto k2 = std::size_t(i);
      const double row[7] = {p.t, cfg.sim.grid.x1(i), p.e[k2], p.h[k2], p.d[k2], p.f[k2], p.m[k2]};
      for (int c = 0; c < 7; ++c) prof.columns[std::size_t(c)].push_back(row[c]);
    }
  write_csv(dir / "profiles.csv", prof);
  names.push_back("profiles.csv");

  for (std::size_t n = 0; n < res.checkpoints.size(); ++n) {
    const std::string base = "ledger_" + std::to_string(n);
    write_csv(dir / (base + ".csv"), ledger_table(res.checkpoints[n].ledger));
    write_json(dir / (base + ".json"), ledger_scalars(res.checkpoints[n].ledger));
    names.push_back(base + ".csv");
    names.push_back(base + ".json");
  }
  return names;
}

inline int cmd_run(const AppConfig& cfg, const fs::path& out_dir, bool quiet = false) {
  const auto start = std::chrono::steady_clock::now();
  const KernelConstants k = kernel_constants_for(cfg);
  double next_report = 0.0;
  auto progress = [&](const StepView& v) {
    if (quiet || v.state.t < next_report) return;
    std::cerr << "t=" << v.state.t << " steps=" << v.step << " |omega|=" << v.omega_sup << "\n";
    next_report += cfg.sim.T_final / 10.0;
  };
  const RunResult res = simulate(cfg, k, progress);
  fs::create_directories(out_dir);
  const std::vector<std::string> names = write_run_outputs(out_dir, cfg, k, res);

  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const double T = res.final_ledger().T;
  json checkpoints = json::array();
  for (std::size_t n = 0; n < res.checkpoints.size(); ++n)
    checkpoints.push_back({{"T", res.checkpoints[n].T}, {"ledger", "ledger_" + std::to_string(n) + ".csv"},
                           {"scalars", "ledger_" + std::to_string(n) + ".json"}});
  json manifest = {
      {"version", kVersion},
      {"config", cfg.raw},
      {"constants_file", "constants.json"},
      {"status", to_string(res.trajectory.status)},
      {"message", res.trajectory.message},
      {"partial", res.trajectory.status != RunStatus::completed},
      {"steps", res.trajectory.steps},
      {"wall_clock_s", wall},
      {"horizon", {{"L", cfg.sim.grid.L},
                   {"T", T},
                   {"required_L", horizon_length(res.constants, T)},
                   {"ok", horizon_ok(res.constants, cfg.sim.grid.L, T)}}},
      {"checkpoints", checkpoints},
      {"files", inventory(out_dir, names)},
  };
  write_json(out_dir / "manifest.json", manifest);
  if (!quiet) std::cerr << "run " << to_string(res.trajectory.status) << " in " << wall << " s\n";
  return res.trajectory.status == RunStatus::completed ? kPass : kNumericalAbort;
}

// --- verify ------------------------------------------------------------------

struct VerifyResult {
  json report;
  bool failed = false;
};

inline VerifyResult verify_run_directory(const fs::path& run_dir, const std::optional<std::vector<Window>>& windows) {
  const json manifest = read_json(run_dir / "manifest.json");
  std::set<std::string> listed;
  try {
    for (const auto& f : manifest.at("files")) {
      const std::string path = f.at("path").get<std::string>();
      if (!fs::exists(run_dir / path)) throw InputError("missing output file " + path);
      if (sha256_file(run_dir / path) != f.at("sha256").get<std::string>())
        throw InputError("digest mismatch for " + path);
      listed.insert(path);
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("manifest: ") + e.what());
  }
  auto require_listed = [&](const std::string& n) {
    if (!listed.count(n)) throw InputError("manifest lists no digest for " + n);
  };
  require_listed("config.txt");
  require_listed("constants.json");
  require_listed("series.csv");
  require_listed("distance.csv");

  const AppConfig cfg = load_config((run_dir / "config.txt").string());
  const Grid& g = cfg.sim.grid;
  const json cdoc = read_json(run_dir / "constants.json");
  KernelConstants k;
  double M = 0.0;
  try {
    k = kernel_from_json(cdoc.at("kernel"));
    M = cdoc.at("constants").at("M").get<double>();
  } catch (const json::exception& e) {
    throw InputError(std::string("constants.json: ") + e.what());
  }
  const Constants c = derive_constants(k, M);
  const Table series = read_csv(run_dir / "series.csv");
  const Table dist = read_csv(run_dir / "distance.csv");
  DistanceSeries ds;
  ds.R = cfg.dist_R;
  ds.t = dist.column("t");
  ds.d_R = dist.column("d_R");
  ds.m_star = dist.column("m_star");

  CheckOptions opt = check_options(cfg);
  if (windows) opt.windows = *windows;

  VerifyResult out;
  json per_T = json::array();
  json occupation = json::array();
  try {
    for (const auto& cp : manifest.at("checkpoints")) {
      const std::string lname = cp.at("ledger").get<std::string>(), sname = cp.at("scalars").get<std::string>();
      require_listed(lname);
      require_listed(sname);
      const LedgerData l = ledger_from(g, read_csv(run_dir / lname), read_json(run_dir / sname), series);
      const auto reports = run_checks(l, c, opt);
      json arr = json::array();
      for (const auto& r : reports) arr.push_back(to_json(r));
      out.failed = out.failed || any_unconditional_failure(reports);
      per_T.push_back({{"T", l.T}, {"horizon_ok", horizon_ok(c, g.L, l.T)}, {"reports", arr}});
      const OccupationRecord occ = occupation_time(ds, cfg.epsilon, l.T);
      occupation.push_back({{"T", l.T},
                            {"epsilon", occ.epsilon},
                            {"R", occ.R},
                            {"time_outside", occ.time_outside},
                            {"fraction", occ.fraction()},
                            {"samples", occ.samples}});
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("manifest checkpoints: ") + e.what());
  }
  out.report = json{{"version", kVersion},
                    {"run", run_dir.string()},
                    {"run_status", manifest.value("status", std::string("unknown"))},
                    {"constants", to_json(c)},
                    {"checkpoints", per_T},
                    {"occupation", occupation},
                    {"verdict", out.failed ? "fail" : "pass"}};
  return out;
}

inline int cmd_verify(const fs::path& run_dir, const fs::path& out_dir, const std::optional<std::vector<Window>>& windows,
                      bool quiet = false) {
  const VerifyResult v = verify_run_directory(run_dir, windows);
  fs::create_directories(out_dir);
  write_json(out_dir / "report.json", v.report);
  if (!quiet) {
    for (const auto& cp : v.report["checkpoints"])
      for (const auto& r : cp["reports"])
        std::cerr << "T=" << cp["T"].get<double>() << " " << r["name"].get<std::string>() << ": "
                  << r["verdict"].get<std::string>() << "\n";
    std::cerr << "verify: " << v.report["verdict"].get<std::string>() << "\n";
  }
  return v.failed ? kCheckFailure : kPass;
}

// --- sweep -------------------------------------------------------------------

inline unsigned worker_count() {
  if (const char* env = std::getenv("CYLFLOW_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return unsigned(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

struct SweepRow {
  double value = 0.0;
  double T = 0.0;
  double e_star_T = 0.0;
  double u_sup_T = 0.0;
  double time_outside = 0.0;
  double u_slope = 0.0;  // log-log slope of ||u(t)|| over [T/10, T]
  std::string status;
};

inline AppConfig sweep_variant(AppConfig cfg, const std::string& parameter, double value) {
  if (parameter == "T") {
    cfg.sim.T_final = value;
    cfg.raw["time.T"] = format_double(value);
  } else if (parameter == "U") {
    const std::string key = cfg.sim.initial_condition.kind == "random_band_limited" ? "amplitude"
                            : cfg.sim.initial_condition.kind == "taylor_green"      ? "A"
                            : cfg.sim.initial_condition.kind == "uniform"           ? "c"
                                                                                    : "U";
    cfg.sim.initial_condition.params[key] = value;
    cfg.raw["ic.params." + key] = format_double(value);
  } else {
    cfg.sim.initial_condition.seed = std::uint64_t(value);
    cfg.raw["ic.seed"] = format_double(value);
  }
  validate(cfg);
  return cfg;
}

inline SweepRow sweep_one(const AppConfig& base, const KernelConstants& k, double value) {
  SweepRow row;
  row.value = value;
  try {
    const AppConfig cfg = sweep_variant(base, base.sweep_parameter, value);
    row.T = cfg.sim.T_final;
    const RunResult res = simulate(cfg, k);
    const LedgerData& l = res.final_ledger();
    row.e_star_T = l.e_starT();
    row.u_sup_T = l.series.u_sup.back();
    row.time_outside = occupation_time(res.distance, cfg.epsilon, l.T).time_outside;
    std::vector<double> ts, us;
    for (std::size_t n = 0; n < l.series.size(); ++n)
      if (l.series.t[n] >= l.T / 10.0) {
        ts.push_back(l.series.t[n]);
        us.push_back(l.series.u_sup[n]);
      }
    row.u_slope = fit_loglog_slope(ts, us);
    row.status = to_string(res.trajectory.status);
  } catch (const std::exception& e) {
    row.status = std::string("error: ") + e.what();
  }
  return row;
}

struct Summary {
  double mean = 0.0, sd = 0.0, ci95 = 0.0;
  std::size_t n = 0;
};

inline Summary summarize(const std::vector<double>& xs) {
  Summary s;
  for (double x : xs)
    if (std::isfinite(x)) {
      s.mean += x;
      ++s.n;
    }
  if (s.n == 0) return s;
  s.mean /= double(s.n);
  double v = 0.0;
  for (double x : xs)
    if (std::isfinite(x)) v += (x - s.mean) * (x - s.mean);
  s.sd = s.n > 1 ? std::sqrt(v / double(s.n - 1)) : 0.0;
  s.ci95 = s.n > 1 ? 1.96 * s.sd / std::sqrt(double(s.n)) : 0.0;
  return s;
}

inline std::vector<SweepRow> run_sweep(const AppConfig& cfg) {
  if (cfg.sweep_parameter.empty()) throw ConfigError("sweep: sweep.parameter is not set");
  if (cfg.sweep_values.empty()) throw ConfigError("sweep: sweep.values is empty");
  for (double v : cfg.sweep_values) (void)sweep_variant(cfg, cfg.sweep_parameter, v);
  const KernelConstants k = kernel_constants_for(cfg);
  std::vector<SweepRow> rows(cfg.sweep_values.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t n; (n = next++) < rows.size();) rows[n] = sweep_one(cfg, k, cfg.sweep_values[n]);
  };
  std::vector<std::thread> pool;
  const unsigned nthreads = std::min<unsigned>(worker_count(), unsigned(rows.size()));
  for (unsigned t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return rows;
}

inline json sweep_summary(const AppConfig& cfg, const std::vector<SweepRow>& rows) {
  std::vector<double> x, e, u, occ, slope;
  for (const auto& r : rows) {
    if (r.status != "completed") continue;
    x.push_back(r.value);
    e.push_back(r.e_star_T);
    u.push_back(r.u_sup_T);
    occ.push_back(r.time_outside);
    slope.push_back(r.u_slope);
  }
  json j = {{"parameter", cfg.sweep_parameter}, {"runs", rows.size()}, {"completed", x.size()}};
  auto finite = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  if (cfg.sweep_parameter == "seed") {
    for (const auto& [name, xs] : {std::pair{"e_star_T", e}, {"u_sup_T", u}, {"time_outside", occ}, {"u_slope", slope}}) {
      const Summary s = summarize(xs);
      j["statistics"][name] = {{"mean", s.mean}, {"sd", s.sd}, {"ci95", s.ci95}, {"n", s.n}};
    }
  } else {
    j["loglog_slope"] = {{"e_star_T", finite(fit_loglog_slope(x, e))},
                         {"u_sup_T", finite(fit_loglog_slope(x, u))},
                         {"time_outside", finite(fit_loglog_slope(x, occ))}};
  }
  return j;
}

inline int cmd_sweep(const AppConfig& cfg, const fs::path& out_dir, bool quiet = false) {
  const std::vector<SweepRow> rows = run_sweep(cfg);
  fs::create_directories(out_dir);
  Table t;
  t.header = {"value", "T", "e_star_T", "u_sup_T", "time_outside", "u_slope", "ok"};
  t.columns.assign(7, {});
  for (const auto& r : rows) {
    const double vals[7] = {r.value, r.T, r.e_star_T, r.u_sup_T, r.time_outside, r.u_slope, r.status == "completed" ? 1.0 : 0.0};
    for (int c = 0; c < 7; ++c) t.columns[std::size_t(c)].push_back(vals[c]);
  }
  write_csv(out_dir / "sweep.csv", t);
  json summary = sweep_summary(cfg, rows);
  json status = json::array();
  for (const auto& r : rows) status.push_back({{"value", r.value}, {"status", r.status}});
  summary["status"] = status;
  write_json(out_dir / "sweep_summary.json", summary);
  if (!quiet)
    for (const auto& r : rows) std::cerr << cfg.sweep_parameter << "=" << r.value << " " << r.status << "\n";
  return kPass;
}

}  // namespace cylflow
