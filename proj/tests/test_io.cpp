#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include "support.hpp"

using namespace cylflow;
using namespace testing_support;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag)
      : path(fs::temp_directory_path() / ("cylflow_" + tag + "_" + std::to_string(::getpid()))) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

const char* kBaseConfig =
    "grid.L = 16\n"
    "grid.N1 = 32\n"
    "grid.N2 = 8\n"
    "time.dt = 0.01\n"
    "time.T = 1\n";

}  // namespace

TEST_CASE("sha256 test vectors") {
  CHECK(sha256_bytes("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_bytes("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_bytes("abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq") ==
        "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
  TempDir tmp("sha");
  write_text(tmp.path / "f.txt", "abc");
  CHECK(sha256_file(tmp.path / "f.txt") == sha256_bytes("abc"));
  CHECK_THROWS_AS(sha256_file(tmp.path / "missing"), InputError);
}

TEST_CASE("csv round trip is bit exact") {
  TempDir tmp("csv");
  Gen gen(61);
  Table t;
  t.header = {"a", "b", "c"};
  t.columns.resize(3);
  for (int r = 0; r < 200; ++r) {
    t.columns[0].push_back(gen.normal() * std::pow(10.0, gen.integer(-300, 300)));
    t.columns[1].push_back(gen.uniform(-1.0, 1.0));
    t.columns[2].push_back(double(r));
  }
  t.columns[1][5] = 0.1;
  t.columns[1][6] = -0.0;
  t.columns[1][7] = std::numeric_limits<double>::denorm_min();
  write_csv(tmp.path / "t.csv", t);
  const Table u = read_csv(tmp.path / "t.csv");
  CHECK(u.header == t.header);
  REQUIRE(u.rows() == t.rows());
  for (std::size_t k = 0; k < 3; ++k) CHECK(u.columns[k] == t.columns[k]);
  CHECK(u.column("c") == t.columns[2]);
  CHECK_THROWS_AS((void)u.column("d"), InputError);
  // Writing the read-back table reproduces the bytes.
  write_csv(tmp.path / "u.csv", u);
  CHECK(read_file(tmp.path / "u.csv") == read_file(tmp.path / "t.csv"));

  t.columns[2].pop_back();
  CHECK_THROWS_AS(write_csv(tmp.path / "bad.csv", t), std::logic_error);
}

TEST_CASE("csv parse errors carry the line") {
  TempDir tmp("csverr");
  write_text(tmp.path / "a.csv", "x,y\n1,2\n3,oops\n");
  try {
    (void)read_csv(tmp.path / "a.csv");
    FAIL("expected InputError");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find(":3:") != std::string::npos);
  }
  write_text(tmp.path / "b.csv", "x,y\n1\n");
  CHECK_THROWS_AS(read_csv(tmp.path / "b.csv"), InputError);
  write_text(tmp.path / "c.csv", "x,y\n1,2,3\n");
  CHECK_THROWS_AS(read_csv(tmp.path / "c.csv"), InputError);
  write_text(tmp.path / "d.csv", "");
  CHECK_THROWS_AS(read_csv(tmp.path / "d.csv"), InputError);
  CHECK_THROWS_AS(read_csv(tmp.path / "none.csv"), InputError);
  write_text(tmp.path / "e.json", "{\"a\": ");
  CHECK_THROWS_AS(read_json(tmp.path / "e.json"), InputError);
}

TEST_CASE("ledger survives a disk round trip") {
  TempDir tmp("ledger");
  SimConfig cfg;
  cfg.grid = {12.0, 48, 16};
  cfg.dt = 2e-3;
  cfg.T_final = 0.1;
  Gen gen(67);
  const FlowState s = gen.band_limited(cfg.grid, 2.0, 0.3);
  const LedgerData l = ledger_of(cfg, s, {{2.0, 7.0}});
  write_csv(tmp.path / "p.csv", ledger_table(l));
  write_csv(tmp.path / "s.csv", series_table(l.series));
  write_json(tmp.path / "l.json", ledger_scalars(l));
  const LedgerData r =
      ledger_from(cfg.grid, read_csv(tmp.path / "p.csv"), read_json(tmp.path / "l.json"), read_csv(tmp.path / "s.csv"));
  CHECK(r.T == l.T);
  CHECK(r.samples == l.samples);
  CHECK(r.E.values == l.E.values);
  CHECK(r.F.values == l.F.values);
  CHECK(r.D.values == l.D.values);
  CHECK(r.EE2.values == l.EE2.values);
  CHECK(r.e0.values == l.e0.values);
  CHECK(r.series.omega_sup == l.series.omega_sup);
  CHECK(r.f2_ed.value == l.f2_ed.value);
  CHECK(r.m2_minus_4e.value == l.m2_minus_4e.value);
  REQUIRE(r.windows.size() == 1);
  CHECK(r.windows[0].A_sup == l.windows[0].A_sup);

  const Constants c = derive_constants(compute_kernel_constants(QuadratureSpec{}), 2.0);
  const auto a = run_checks(l, c), b = run_checks(r, c);
  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].name == b[k].name);
    CHECK(a[k].lhs == b[k].lhs);
    CHECK(a[k].verdict == b[k].verdict);
  }
  CHECK_THROWS_AS(ledger_from(Grid{12.0, 32, 16}, read_csv(tmp.path / "p.csv"), read_json(tmp.path / "l.json"),
                              read_csv(tmp.path / "s.csv")),
                  InputError);
  json broken = read_json(tmp.path / "l.json");
  broken.erase("sup_d");
  CHECK_THROWS_AS(ledger_from(cfg.grid, read_csv(tmp.path / "p.csv"), broken, read_csv(tmp.path / "s.csv")), InputError);
}

TEST_CASE("config parsing") {
  const AppConfig c = parse_config_string(std::string(kBaseConfig) +
                                          "# comment line\n"
                                          "ic.kind = kolmogorov   # trailing comment\n"
                                          "ic.params.U = 2.5\n"
                                          "output.windows = 1:3, 4.5:8\n"
                                          "output.checkpoints = 0.25,0.5\n"
                                          "time.scheme = rk4\n"
                                          "time.dealias = off\n"
                                          "constants.M = 3\n");
  CHECK(c.sim.grid.L == 16.0);
  CHECK(c.sim.grid.n1 == 32);
  CHECK(c.sim.initial_condition.kind == "kolmogorov");
  CHECK(c.sim.initial_condition.params.at("U") == 2.5);
  REQUIRE(c.windows.size() == 2);
  CHECK(c.windows[1].a == 4.5);
  CHECK(c.windows[1].b == 8.0);
  CHECK(c.sim.checkpoints == std::vector<double>{0.25, 0.5});
  CHECK(c.sim.scheme == Scheme::rk4);
  CHECK_FALSE(c.sim.dealias);
  CHECK(*c.M == 3.0);
  CHECK(c.dist_R == 2.0);
  CHECK(c.epsilon == 0.05);

  // Echo is canonical: parsing it again yields the same echo.
  const AppConfig d = parse_config_string(echo_config(c));
  CHECK(echo_config(d) == echo_config(c));
  CHECK(d.windows.size() == 2);
}

TEST_CASE("config errors name the line") {
  auto error_of = [](const std::string& text) {
    try {
      (void)parse_config_string(text);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  const std::string base = kBaseConfig;
  CHECK(error_of(base + "grid.bogus = 1\n").find(":6:") != std::string::npos);
  CHECK(error_of(base + "grid.bogus = 1\n").find("unknown key") != std::string::npos);
  CHECK(error_of(base + "no equals sign\n").find(":6:") != std::string::npos);
  CHECK(error_of(base + "time.dt = 0.02\n").find("duplicate") != std::string::npos);
  CHECK(error_of(base + "time.scheme = euler\n").find("rk2") != std::string::npos);
  CHECK(!error_of(base + "grid.N1 = 31.5\n").empty());
  CHECK(!error_of(base + "output.windows = 3:1\n").empty());
  CHECK(!error_of(base + "output.windows = 3\n").empty());
  CHECK(!error_of(base + "output.windows = 1:20\n").empty());
  CHECK(!error_of(base + "output.dist_R = 9\n").empty());
  CHECK(!error_of(base + "verify.epsilon = 0\n").empty());
  CHECK(!error_of(base + "constants.M = 0\n").empty());
  CHECK(!error_of(base + "time.dealias = maybe\n").empty());
  CHECK(!error_of(base + "sweep.parameter = dt\n").empty());
  CHECK(!error_of(base + "quad.X = 5\n").empty());
  CHECK(!error_of("grid.L = 16\ngrid.N1 = 32\ngrid.N2 = 8\ntime.dt = -1\n").empty());
  CHECK(!error_of("grid.L = 16\ngrid.N1 = 0\ngrid.N2 = 8\n").empty());
  CHECK(error_of(base).empty());
  CHECK_THROWS_AS(load_config("/nonexistent/cylflow.cfg"), ConfigError);
}

TEST_CASE("shipped configs parse") {
  for (const auto& entry : fs::directory_iterator(fs::path(CYLFLOW_SOURCE_DIR) / "configs")) {
    if (entry.path().extension() != ".cfg") continue;
    CAPTURE(entry.path().string());
    CHECK_NOTHROW((void)load_config(entry.path().string()));
  }
}

TEST_CASE("number formatting round trips") {
  Gen gen(71);
  for (int n = 0; n < 1000; ++n) {
    const double v = gen.normal() * std::pow(10.0, gen.integer(-30, 30));
    CHECK(std::strtod(format_double(v).c_str(), nullptr) == v);
  }
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(1e300) == "1.0000000000000001e+300");
}
