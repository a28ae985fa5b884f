#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "spinfluid/cli.hpp"
#include "spinfluid/errors.hpp"
#include "spinfluid/snapshot.hpp"

using namespace sf;
namespace fs = std::filesystem;

namespace {

struct StderrCapture {
  std::ostringstream buffer;
  std::streambuf* old;
  StderrCapture() : old(std::cerr.rdbuf(buffer.rdbuf())) {}
  ~StderrCapture() { std::cerr.rdbuf(old); }
  std::string text() const { return buffer.str(); }
};

fs::path scratch(const std::string& name) {
  fs::path d = fs::temp_directory_path() / "spinfluid_cli_test" / name;
  fs::remove_all(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string first_line(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  return line;
}

RunOptions options(const fs::path& out, std::vector<std::string> overrides) {
  RunOptions o;
  o.output = out;
  o.overrides = std::move(overrides);
  o.quiet = true;
  return o;
}

}  // namespace

TEST_CASE("config sections, typed lookups and overrides") {
  Config c = Config::from_string(
      "# comment\n[grid]\nn = 64\nlength = 6.5\n[plasma.species.1]\nmass = 2\n[flags]\ndealias = off\n");
  CHECK(c.integer("grid", "n", 0) == 64);
  CHECK(c.number("grid", "length", 0.0) == 6.5);
  CHECK(c.number("plasma.species.1", "mass", 0.0) == 2.0);
  CHECK_FALSE(c.boolean("flags", "dealias", true));
  CHECK(c.number("physics", "hbar", 1.0) == 1.0);
  c.set("plasma.species.1.mass=3.5");
  c.set("integrator.dt = 0.5");
  CHECK(c.number("plasma.species.1", "mass", 0.0) == 3.5);
  CHECK(c.number("integrator", "dt", 0.0) == 0.5);
  CHECK(c.sections("plasma.species.").size() == 1);
  CHECK(c.vec3("fields", "b0", {1, 2, 3})[2] == 3.0);
  CHECK(parse_vec3("1, 2", "x")[1] == 2.0);
  CHECK_THROWS_AS(c.set("nodot=1"), ConfigError);
  CHECK_THROWS_AS(c.set("grid.n"), ConfigError);
  CHECK_THROWS_AS(parse_number("1.5x", "grid.length"), ConfigError);
  CHECK_THROWS_AS(parse_integer("2.5", "grid.n"), ConfigError);
  CHECK_THROWS_AS(parse_bool("maybe", "flags.dealias"), ConfigError);
  CHECK_THROWS_AS(Config::from_string("[grid]\nn = 1\nn = 2\n"), ConfigError);
  try {
    parse_number("abc", "integrator.dt");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("integrator.dt") != std::string::npos);
  }
  c.set("grid.typo=1");
  CHECK_THROWS_AS(c.require_all_used(), ConfigError);
}

TEST_CASE("scenario loading validates every field") {
  Config c;
  Scenario sc = load_scenario(c);
  CHECK(sc.grid.dim() == 1);
  CHECK(sc.integrator.steps() == 1000);
  c.set("integrator.t_final=0.10005");
  CHECK_THROWS_AS(load_scenario(c), ConfigError);
  Config bad;
  bad.set("fields.b=uniform");
  bad.set("fields.b0=0 0 1");
  CHECK_THROWS_AS(load_scenario(bad), ConfigError);
  bad.set("flags.zeeman_test_mode=true");
  CHECK_NOTHROW(load_scenario(bad));
  Config odd;
  odd.set("grid.n=33");
  CHECK_THROWS_AS(load_scenario(odd), ConfigError);
  Config seeded;
  seeded.set("initial.type=random");
  CHECK(load_scenario(seeded, 99).initial.seed == 99);
}

TEST_CASE("negative time step exits with a config error naming the field") {
  StderrCapture cap;
  CHECK(run("compare", options(scratch("neg"), {"integrator.dt=-1e-4"})) == kExitConfig);
  CHECK(cap.text().find("integrator.dt") != std::string::npos);
  CHECK(run("no-such-command", options(scratch("neg"), {})) == kExitConfig);
  CHECK(run("compare", options(scratch("neg"), {"bogus.key=1"})) == kExitConfig);
  CHECK(run("compare", options(scratch("neg"), {"grid.nn=1"})) == kExitConfig);
}

TEST_CASE("compare on the spin-up Gaussian writes an error time series below 1e-3") {
  fs::path out = scratch("compare");
  CHECK(run("compare", options(out, {})) == kExitOk);
  CHECK(first_line(out / "diagnostics.csv") == "time [t_nat],err_rho [1],err_u [1],err_s [1]");
  std::ifstream in(out / "diagnostics.csv");
  std::string line, last;
  int rows = 0;
  std::getline(in, line);
  while (std::getline(in, line)) {
    last = line;
    ++rows;
  }
  CHECK(rows == 11);
  std::stringstream ss(last);
  std::string cell;
  std::vector<double> v;
  while (std::getline(ss, cell, ',')) v.push_back(std::stod(cell));
  REQUIRE(v.size() == 4);
  CHECK(v[0] == doctest::Approx(0.1));
  for (int k = 1; k < 4; ++k) CHECK(v[k] < 1e-3);
  CHECK(fs::exists(out / "manifest.txt"));
  CHECK(slurp(out / "manifest.txt").find("subcommand = compare") != std::string::npos);
}

TEST_CASE("identical config and seed give identical bytes") {
  fs::path a = scratch("repro_a"), b = scratch("repro_b");
  std::vector<std::string> ov{"initial.type=random", "initial.kmax=1", "grid.dim=2", "grid.n=16", "grid.length=6.283185307179586",
                              "integrator.dt=1e-3", "integrator.t_final=0.01", "integrator.snapshot_every=5",
                              "physics.unit_time=fs"};
  RunOptions oa = options(a, ov), ob = options(b, ov);
  oa.seed = ob.seed = 17;
  CHECK(run("simulate-hydro", oa) == kExitOk);
  CHECK(run("simulate-hydro", ob) == kExitOk);
  CHECK(first_line(a / "diagnostics.csv").find("time [fs]") != std::string::npos);
  std::size_t files = 0;
  for (const auto& e : fs::recursive_directory_iterator(a)) {
    if (!e.is_regular_file() || e.path().filename() == "manifest.txt") continue;
    fs::path rel = fs::relative(e.path(), a);
    CHECK(slurp(e.path()) == slurp(b / rel));
    ++files;
  }
  CHECK(files == 1 + 3 * 3 * 2);
  CHECK(fs::exists(a / "snapshots" / "0002.s.bin"));
}

TEST_CASE("a snapshot written by one run seeds another") {
  fs::path a = scratch("seed_run"), b = scratch("from_snapshot");
  CHECK(run("simulate-pauli", options(a, {"integrator.t_final=0.001", "integrator.dt=1e-4"})) == kExitOk);
  std::string p1 = (a / "snapshots" / "0001.psi1").string(), p2 = (a / "snapshots" / "0001.psi2").string();
  CHECK(run("simulate-pauli", options(b, {"initial.type=snapshot", "initial.psi1=" + p1, "initial.psi2=" + p2,
                                          "integrator.t_final=0.001", "integrator.dt=1e-4"})) == kExitOk);
  Snapshot s = read_snapshot(b / "snapshots" / "0000.psi1");
  Snapshot r = read_snapshot(a / "snapshots" / "0001.psi1");
  CHECK(s.values == r.values);
  CHECK(run("simulate-pauli", options(b, {"initial.type=snapshot", "initial.psi1=/nonexistent",
                                          "initial.psi2=/nonexistent"})) == kExitConfig);
}

TEST_CASE("numerical breakdown and verification failure exit codes") {
  CHECK(run("simulate-hydro", options(scratch("breakdown"), {"initial.type=random", "integrator.spin_drift_limit=1e-300",
                                                              "integrator.t_final=1e-3", "integrator.dt=1e-3"})) ==
        kExitBreakdown);
  CHECK(run("reconstruct", options(scratch("recon"), {"initial.type=plane_wave", "initial.modes=3",
                                                      "initial.eta=0.5"})) == kExitOk);
  CHECK(run("reconstruct", options(scratch("recon_strict"), {"initial.type=plane_wave", "initial.modes=3",
                                                             "verify.reconstruct_tolerance=1e-300"})) ==
        kExitVerification);
}

TEST_CASE("verify writes identity and structural reports with units") {
  fs::path out = scratch("verify");
  CHECK(run("verify", options(out, {"verify.states=1"})) == kExitOk);
  CHECK(first_line(out / "identity_report.csv") ==
        "group,state,check,max_residual [1],l2_residual [1],masked [points],tolerance [1],pass");
  CHECK(slurp(out / "identity_report.csv").find(",false") == std::string::npos);
  CHECK(slurp(out / "structural_report.csv").find("bracket_vs_hydro") != std::string::npos);
}

TEST_CASE("energy audit and plasma runs") {
  fs::path out = scratch("audit");
  CHECK(run("energy-audit", options(out, {"integrator.t_final=0.01"})) == kExitOk);
  CHECK(first_line(out / "diagnostics.csv").find("pauli_total [E_nat]") != std::string::npos);
  fs::path pl = scratch("plasma");
  std::vector<std::string> ov{"plasma.species.1.type=random", "plasma.species.1.kmax=1",
                              "plasma.species.2.type=random", "plasma.species.2.kmax=1",
                              "plasma.species.2.seed=5",      "plasma.interaction.kind=separable",
                              "plasma.interaction.J=0.1",     "plasma.interaction.width=1.5",
                              "grid.n=16",                    "integrator.dt=1e-3",
                              "integrator.t_final=0.01"};
  CHECK(run("plasma", options(pl, ov)) == kExitOk);
  CHECK(fs::exists(pl / "product_report.csv"));
  CHECK(fs::exists(pl / "snapshots" / "0000.rho_1.bin"));
  ov.push_back("plasma.species.2.bogus=1");
  CHECK(run("plasma", options(scratch("plasma_bad"), ov)) == kExitConfig);
  CHECK(run("plasma", options(scratch("plasma_none"), {})) == kExitConfig);
}
