#pragma once

// CSV/JSON emission and parsing, SHA-256 digests, and (de)serialization of
// constants and ledgers.

#include <openssl/evp.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cylflow/bounds.hpp"
#include "cylflow/energetics.hpp"
#include "cylflow/kernel.hpp"
#include "cylflow/report.hpp"

namespace cylflow {

using json = nlohmann::ordered_json;

inline constexpr const char* kVersion = "cylflow 0.1.0";

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// --- CSV ------------------------------------------------------------------

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;

  [[nodiscard]] std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
  [[nodiscard]] const std::vector<double>& column(const std::string& name) const {
    for (std::size_t k = 0; k < header.size(); ++k)
      if (header[k] == name) return columns[k];
    throw InputError("csv: missing column '" + name + "'");
  }
};

inline void write_csv(const std::filesystem::path& path, const Table& t) {
  for (const auto& c : t.columns)
    if (c.size() != t.rows()) throw std::logic_error("write_csv: ragged columns");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (std::size_t k = 0; k < t.header.size(); ++k) out << (k ? "," : "") << t.header[k];
  out << "\n";
  for (std::size_t r = 0; r < t.rows(); ++r) {
    for (std::size_t k = 0; k < t.columns.size(); ++k) out << (k ? "," : "") << format_double(t.columns[k][r]);
    out << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

inline Table read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  Table t;
  std::string line;
  if (!std::getline(in, line)) throw InputError(path.string() + ": empty file");
  {
    std::istringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) t.header.push_back(cell);
  }
  t.columns.resize(t.header.size());
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    std::size_t k = 0;
    while (std::getline(ls, cell, ',')) {
      if (k >= t.columns.size()) throw InputError(path.string() + ":" + std::to_string(lineno) + ": too many fields");
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str() || *end != '\0')
        throw InputError(path.string() + ":" + std::to_string(lineno) + ": bad number '" + cell + "'");
      t.columns[k++].push_back(v);
    }
    if (k != t.columns.size()) throw InputError(path.string() + ":" + std::to_string(lineno) + ": too few fields");
  }
  return t;
}

// --- digests --------------------------------------------------------------

inline std::string sha256_bytes(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  std::ostringstream os;
  for (unsigned int k = 0; k < len; ++k) os << std::hex << std::setw(2) << std::setfill('0') << int(md[k]);
  return os.str();
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string sha256_file(const std::filesystem::path& path) { return sha256_bytes(read_file(path)); }

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

inline void write_json(const std::filesystem::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

inline json read_json(const std::filesystem::path& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

// --- constants ------------------------------------------------------------

inline json to_json(const KernelConstants& k) {
  return json{{"norm_d2K", k.norm_d2K},
              {"norm_d1Kbar", k.norm_d1Kbar},
              {"C1", k.C1},
              {"C2", k.C2},
              {"quadrature", {{"X", k.resolution.X},
                              {"panels_per_unit", k.resolution.panels_per_unit},
                              {"corner_panels", k.resolution.corner_panels},
                              {"gauss_order", detail::kGaussOrder},
                              {"refinement_change", k.refinement_change}}},
              {"derivation", k.derivation}};
}

inline json to_json(const Constants& c) {
  return json{{"M", c.M},         {"C1", c.C1},         {"C2", c.C2},       {"c_a", c.c_a},
              {"c_b", c.c_b},     {"poincare", c.poincare}, {"C4", c.C4}, {"beta", c.beta},
              {"gamma", c.gamma}, {"sigma", c.sigma},   {"kappa", c.kappa}, {"derivation", c.derivation}};
}

inline KernelConstants kernel_from_json(const json& j) {
  try {
    KernelConstants k;
    k.norm_d2K = j.at("norm_d2K").get<double>();
    k.norm_d1Kbar = j.at("norm_d1Kbar").get<double>();
    k.C1 = j.at("C1").get<double>();
    k.C2 = j.at("C2").get<double>();
    const auto& q = j.at("quadrature");
    k.resolution = {q.at("X").get<double>(), q.at("panels_per_unit").get<int>(), q.at("corner_panels").get<int>()};
    k.refinement_change = q.at("refinement_change").get<double>();
    k.derivation = j.at("derivation").get<std::vector<std::string>>();
    return k;
  } catch (const json::exception& e) {
    throw InputError(std::string("constants: ") + e.what());
  }
}

// --- reports --------------------------------------------------------------

inline json to_json(const BoundReport& r) {
  json c = json::object();
  for (const auto& [k, v] : r.constants) c[k] = v;
  auto num = [](double v) { return std::isfinite(v) ? json(v) : json(format_double(v)); };
  return json{{"name", r.name},         {"lhs", num(r.lhs)},     {"rhs", num(r.rhs)},
              {"slack", num(r.slack)},  {"verdict", to_string(r.verdict)}, {"location", r.location},
              {"horizon_ok", r.horizon_ok}, {"unconditional", r.unconditional}, {"rel_tol", r.rel_tol},
              {"abs_tol", r.abs_tol},   {"note", r.note},        {"constants", c}};
}

// --- ledger ---------------------------------------------------------------

inline json sup_to_json(const SupRecord& s) { return json{{"value", s.value}, {"x1", s.x1}, {"t", s.t}}; }

inline SupRecord sup_from_json(const json& j) {
  auto num = [](const json& v) { return v.is_string() ? std::strtod(v.get<std::string>().c_str(), nullptr) : v.get<double>(); };
  return {num(j.at("value")), j.at("x1").get<double>(), j.at("t").get<double>()};
}

inline Table ledger_table(const LedgerData& l) {
  Table t;
  t.header = {"x1", "e0", "eT", "E", "F", "D", "EE2"};
  std::vector<double> x(std::size_t(l.grid.n1));
  for (int i = 0; i < l.grid.n1; ++i) x[std::size_t(i)] = l.grid.x1(i);
  t.columns = {x, l.e0.values, l.eT.values, l.E.values, l.F.values, l.D.values, l.EE2.values};
  return t;
}

inline json ledger_scalars(const LedgerData& l) {
  json windows = json::array();
  for (const auto& w : l.windows)
    windows.push_back({{"a", w.window.a}, {"b", w.window.b}, {"initial_energy", w.initial_energy}, {"A_sup", w.A_sup}});
  auto sup = [](const SupRecord& s) {
    json j = sup_to_json(s);
    if (!std::isfinite(s.value)) j["value"] = format_double(s.value);
    return j;
  };
  return json{{"T", l.T},
              {"samples", l.samples},
              {"series_rows", l.series.size()},
              {"sup_f2_over_ed", sup(l.f2_ed)},
              {"sup_de2_over_ed", sup(l.de2_ed)},
              {"sup_h2_over_ed", sup(l.h2_ed)},
              {"sup_f2_where_d_zero", sup(l.f2_zero_d)},
              {"sup_de2_where_d_zero", sup(l.de2_zero_d)},
              {"sup_d", sup(l.sup_d)},
              {"sup_m2_minus_4e", sup(l.m2_minus_4e)},
              {"windows", windows}};
}

inline Table series_table(const LedgerSeries& s) {
  Table t;
  t.header = {"t", "e_star", "E_star", "EE_star", "u_sup", "omega_sup", "m_sup", "sup_d"};
  t.columns = {s.t, s.e_star, s.E_star, s.EE_star, s.u_sup, s.omega_sup, s.m_sup, s.sup_d};
  return t;
}

inline LedgerSeries series_from_table(const Table& t, std::size_t rows) {
  if (rows > t.rows()) throw InputError("series: fewer rows than the ledger requires");
  LedgerSeries s;
  auto take = [&](const char* name) {
    const auto& c = t.column(name);
    return std::vector<double>(c.begin(), c.begin() + std::ptrdiff_t(rows));
  };
  s.t = take("t");
  s.e_star = take("e_star");
  s.E_star = take("E_star");
  s.EE_star = take("EE_star");
  s.u_sup = take("u_sup");
  s.omega_sup = take("omega_sup");
  s.m_sup = take("m_sup");
  s.sup_d = take("sup_d");
  return s;
}

inline LedgerData ledger_from(const Grid& g, const Table& profiles, const json& scalars, const Table& series) {
  if (profiles.rows() != std::size_t(g.n1)) throw InputError("ledger: profile rows do not match grid.N1");
  try {
    LedgerData l;
    l.grid = g;
    auto prof = [&](const char* name) {
      Profile p(g);
      p.values = profiles.column(name);
      return p;
    };
    l.e0 = prof("e0");
    l.eT = prof("eT");
    l.E = prof("E");
    l.F = prof("F");
    l.D = prof("D");
    l.EE2 = prof("EE2");
    l.T = scalars.at("T").get<double>();
    l.samples = scalars.at("samples").get<std::size_t>();
    l.f2_ed = sup_from_json(scalars.at("sup_f2_over_ed"));
    l.de2_ed = sup_from_json(scalars.at("sup_de2_over_ed"));
    l.h2_ed = sup_from_json(scalars.at("sup_h2_over_ed"));
    l.f2_zero_d = sup_from_json(scalars.at("sup_f2_where_d_zero"));
    l.de2_zero_d = sup_from_json(scalars.at("sup_de2_where_d_zero"));
    l.sup_d = sup_from_json(scalars.at("sup_d"));
    l.m2_minus_4e = sup_from_json(scalars.at("sup_m2_minus_4e"));
    for (const auto& w : scalars.at("windows")) {
      TrackedWindow tw;
      tw.window = {w.at("a").get<double>(), w.at("b").get<double>()};
      tw.snapped = snap_window(g, tw.window.a, tw.window.b);
      tw.initial_energy = w.at("initial_energy").get<double>();
      tw.A_sup = w.at("A_sup").get<double>();
      l.windows.push_back(tw);
    }
    l.series = series_from_table(series, scalars.at("series_rows").get<std::size_t>());
    return l;
  } catch (const json::exception& e) {
    throw InputError(std::string("ledger: ") + e.what());
  }
}

}  // namespace cylflow
