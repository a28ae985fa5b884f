#include "spinfluid/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>
#include <fftw3.h>
#include <fmt/format.h>
#include <fmt/ranges.h>

#include "spinfluid/errors.hpp"
#include "spinfluid/hamiltonian.hpp"
#include "spinfluid/pauli.hpp"
#include "spinfluid/scenarios.hpp"
#include "spinfluid/snapshot.hpp"
#include "spinfluid/spectral.hpp"
#include "spinfluid/suite.hpp"

#ifndef SPINFLUID_VERSION
#define SPINFLUID_VERSION "0.0.0"
#endif

namespace sf {

namespace fs = std::filesystem;

long long IntegratorSpec::steps() const {
  const long long n = std::llround(t_final / dt);
  if (n < 1 || std::abs(n * dt - t_final) > 1e-9 * t_final)
    throw ConfigError("integrator.t_final must be a positive integer multiple of integrator.dt");
  return n;
}

namespace {

std::vector<std::string> tokens(const std::string& s) {
  std::string t = s;
  std::replace(t.begin(), t.end(), ',', ' ');
  std::istringstream in(t);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

Grid load_grid(const Config& cfg, const GridDefaults& d) {
  const long long dim = cfg.integer("grid", "dim", d.dim);
  if (dim < 1 || dim > 3) throw ConfigError("grid.dim must be 1, 2 or 3");
  Index3 sizes{1, 1, 1};
  Vec3 lengths{1.0, 1.0, 1.0};
  auto ns = tokens(cfg.text("grid", "n", std::to_string(d.n)));
  auto ls = tokens(cfg.text("grid", "length", fmt::format("{}", d.length)));
  if (ns.size() != 1 && ns.size() != static_cast<std::size_t>(dim))
    throw ConfigError("grid.n must have one entry or one per axis");
  if (ls.size() != 1 && ls.size() != static_cast<std::size_t>(dim))
    throw ConfigError("grid.length must have one entry or one per axis");
  for (int a = 0; a < dim; ++a) {
    long long n = parse_integer(ns.size() == 1 ? ns[0] : ns[a], "grid.n");
    double l = parse_number(ls.size() == 1 ? ls[0] : ls[a], "grid.length");
    if (n < 2 || n > (1 << 16)) throw ConfigError("grid.n must lie between 2 and 65536");
    if (n % 2 != 0) throw ConfigError("grid.n must be even");
    if (!(l > 0.0)) throw ConfigError("grid.length must be positive");
    sizes[a] = static_cast<int>(n);
    lengths[a] = l;
  }
  return Grid(static_cast<int>(dim), sizes, lengths);
}

ScalarField cosine_profile(const Grid& g, double amplitude, long long mode) {
  ScalarField f(g);
  for (std::size_t i = 0; i < g.points(); ++i) {
    Vec3 x = g.position(i);
    double v = 0.0;
    for (int a = 0; a < g.dim(); ++a) v += std::cos(2.0 * std::numbers::pi * mode * x[a] / g.length(a));
    f[i] = amplitude * v;
  }
  return f;
}

PhysParams load_physics(const Config& cfg, const Grid& g, UnitTags& units) {
  PhysParams p;
  p.hbar = cfg.number("physics", "hbar", 1.0);
  p.mass = cfg.number("physics", "mass", 1.0);
  p.charge = cfg.number("physics", "charge", 1.0);
  p.kappa_s = cfg.number("physics", "kappa_s", 1.0);
  p.c_g = cfg.number("physics", "c_g", 1.0);
  p.c_s = cfg.number("physics", "c_s", 0.5);
  p.rho_floor_rel = cfg.number("physics", "rho_floor", 1e-12);
  const std::string pressure = cfg.text("physics", "pressure", "none");
  const double gamma = cfg.number("physics", "gamma", 2.0);
  const double K = cfg.number("physics", "K", 0.0);
  if (pressure == "polytropic") {
    p.pressure.kind = PressureLaw::Kind::polytropic;
    p.pressure.gamma = gamma;
    p.pressure.K = K;
  } else if (pressure != "none") {
    throw ConfigError(fmt::format("physics.pressure: unknown law '{}'", pressure));
  }
  const std::string potential = cfg.text("physics", "potential", "none");
  const double strength = cfg.number("physics", "potential_strength", 0.0);
  const long long mode = cfg.integer("physics", "potential_mode", 1);
  if (potential == "harmonic") {
    p.V = ScalarField(g);
    for (std::size_t i = 0; i < g.points(); ++i) {
      Vec3 x = g.position(i);
      p.V[i] = 0.5 * strength * (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
    }
  } else if (potential == "cosine") {
    p.V = cosine_profile(g, strength, mode);
  } else if (potential != "none") {
    throw ConfigError(fmt::format("physics.potential: unknown profile '{}'", potential));
  }
  units.time = cfg.text("physics", "unit_time", units.time);
  units.length = cfg.text("physics", "unit_length", units.length);
  units.energy = cfg.text("physics", "unit_energy", units.energy);
  p.validate();
  return p;
}

FieldConfig load_fields(const Config& cfg, const Grid& g) {
  FieldConfig f;
  const std::string phi = cfg.text("fields", "phi", "none");
  const double amp = cfg.number("fields", "phi_amplitude", 0.0);
  const long long mode = cfg.integer("fields", "phi_mode", 1);
  if (phi == "cosine") {
    f.phi = cosine_profile(g, amp, mode);
  } else if (phi != "none") {
    throw ConfigError(fmt::format("fields.phi: unknown profile '{}'", phi));
  }
  const std::string a_mode = cfg.text("fields", "a_mode", "zero");
  if (a_mode == "uniform") {
    f.a_mode = AMode::uniform;
  } else if (a_mode != "zero") {
    throw ConfigError(fmt::format("fields.a_mode: expected zero or uniform, got '{}'", a_mode));
  }
  f.a0 = cfg.vec3("fields", "a0", {0.0, 0.0, 0.0});
  f.a_rate = cfg.vec3("fields", "a_rate", {0.0, 0.0, 0.0});
  const std::string b = cfg.text("fields", "b", "none");
  const Vec3 b0 = cfg.vec3("fields", "b0", {0.0, 0.0, 0.0});
  const Vec3 b1 = cfg.vec3("fields", "b1", {0.0, 0.0, 0.0});
  if (b == "uniform" || b == "sine") {
    f.b = VectorField3(g, b0);
    if (b == "sine") {
      for (std::size_t i = 0; i < g.points(); ++i) {
        double w = std::sin(2.0 * std::numbers::pi * g.position(i)[0] / g.length(0));
        for (int k = 0; k < 3; ++k) f.b[k][i] += b1[k] * w;
      }
    }
  } else if (b != "none") {
    throw ConfigError(fmt::format("fields.b: unknown profile '{}'", b));
  }
  return f;
}

Index3 to_modes(const Vec3& v, const std::string& what) {
  Index3 m{};
  for (int k = 0; k < 3; ++k) {
    if (v[k] != std::round(v[k])) throw ConfigError(what + " must be integers");
    m[k] = static_cast<int>(v[k]);
  }
  return m;
}

InitialSpec load_initial(const Config& cfg, std::optional<std::uint64_t> seed) {
  InitialSpec s;
  s.type = cfg.text("initial", "type", s.type);
  s.sigma = cfg.number("initial", "sigma", s.sigma);
  s.center = cfg.vec3("initial", "center", s.center);
  s.k = cfg.vec3("initial", "k", s.k);
  s.eta = cfg.number("initial", "eta", s.eta);
  s.phi = cfg.number("initial", "phi", s.phi);
  s.modes = to_modes(cfg.vec3("initial", "modes", {1.0, 0.0, 0.0}), "initial.modes");
  s.axis = static_cast<int>(cfg.integer("initial", "axis", s.axis));
  s.pitch = static_cast<int>(cfg.integer("initial", "pitch", s.pitch));
  s.kmax = static_cast<int>(cfg.integer("initial", "kmax", s.kmax));
  s.contrast = cfg.number("initial", "contrast", s.contrast);
  long long sd = cfg.integer("initial", "seed", 1);
  if (sd < 0) throw ConfigError("initial.seed must be non-negative");
  s.seed = seed ? *seed : static_cast<std::uint64_t>(sd);
  s.psi1 = cfg.text("initial", "psi1", "");
  s.psi2 = cfg.text("initial", "psi2", "");
  static const char* kinds[] = {"gaussian", "plane_wave", "spin_texture", "uniform", "random", "snapshot"};
  if (std::find(std::begin(kinds), std::end(kinds), s.type) == std::end(kinds))
    throw ConfigError(fmt::format("initial.type: unknown initial condition '{}'", s.type));
  if (s.type == "gaussian" && !(s.sigma > 0.0)) throw ConfigError("initial.sigma must be positive");
  if (s.type == "random" && (s.kmax < 1 || !(s.contrast >= 0.0 && s.contrast < 1.0)))
    throw ConfigError("initial.kmax must be positive and initial.contrast in [0, 1)");
  if (s.type == "snapshot") {
    for (const auto* p : {&s.psi1, &s.psi2}) {
      if (p->empty()) throw ConfigError("initial.psi1 and initial.psi2 are required for a snapshot start");
      fs::path hdr = *p;
      hdr += ".hdr";
      if (!fs::exists(hdr)) throw ConfigError(fmt::format("initial: snapshot '{}' does not exist", p->string()));
    }
  }
  return s;
}

IntegratorSpec load_integrator(const Config& cfg, HydroOptions& opts) {
  IntegratorSpec s;
  s.dt = cfg.number("integrator", "dt", s.dt);
  s.t_final = cfg.number("integrator", "t_final", s.t_final);
  s.output_every = cfg.integer("integrator", "output_every", s.output_every);
  s.snapshot_every = cfg.integer("integrator", "snapshot_every", s.snapshot_every);
  s.samples = static_cast<int>(cfg.integer("integrator", "samples", s.samples));
  opts.mask_lo = cfg.number("integrator", "mask_lo", opts.mask_lo);
  opts.mask_hi = cfg.number("integrator", "mask_hi", opts.mask_hi);
  opts.spin_drift_limit = cfg.number("integrator", "spin_drift_limit", opts.spin_drift_limit);
  opts.floor_growth_limit = cfg.number("integrator", "floor_growth_limit", opts.floor_growth_limit);
  if (!(s.dt > 0.0)) throw ConfigError(fmt::format("integrator.dt must be positive, got {}", s.dt));
  if (!(s.t_final > 0.0)) throw ConfigError(fmt::format("integrator.t_final must be positive, got {}", s.t_final));
  if (s.output_every < 1) throw ConfigError("integrator.output_every must be at least 1");
  if (s.snapshot_every < 0) throw ConfigError("integrator.snapshot_every must be non-negative");
  if (s.samples < 1) throw ConfigError("integrator.samples must be at least 1");
  if (!(opts.mask_lo > 0.0 && opts.mask_lo < opts.mask_hi && opts.mask_hi < 1.0))
    throw ConfigError("integrator.mask_lo and integrator.mask_hi must satisfy 0 < mask_lo < mask_hi < 1");
  if (!(opts.spin_drift_limit > 0.0)) throw ConfigError("integrator.spin_drift_limit must be positive");
  if (!(opts.floor_growth_limit >= 0.0)) throw ConfigError("integrator.floor_growth_limit must be non-negative");
  s.steps();
  return s;
}

VerifySpec load_verify(const Config& cfg) {
  VerifySpec v;
  v.states = static_cast<int>(cfg.integer("verify", "states", v.states));
  v.compare_tolerance = cfg.number("verify", "compare_tolerance", v.compare_tolerance);
  v.reconstruct_tolerance = cfg.number("verify", "reconstruct_tolerance", v.reconstruct_tolerance);
  if (v.states < 1) throw ConfigError("verify.states must be at least 1");
  if (!(v.compare_tolerance > 0.0) || !(v.reconstruct_tolerance > 0.0))
    throw ConfigError("verify tolerances must be positive");
  return v;
}

// Keys a species section may override, by the section they belong to.
const std::map<std::string, std::string>& species_keys() {
  static const std::map<std::string, std::string> m = {
      {"dim", "grid"},           {"n", "grid"},           {"length", "grid"},     {"hbar", "physics"},
      {"mass", "physics"},       {"charge", "physics"},   {"kappa_s", "physics"}, {"c_g", "physics"},
      {"c_s", "physics"},        {"pressure", "physics"}, {"gamma", "physics"},   {"K", "physics"},
      {"potential", "physics"},  {"potential_strength", "physics"},               {"potential_mode", "physics"},
      {"type", "initial"},       {"sigma", "initial"},    {"center", "initial"},  {"k", "initial"},
      {"eta", "initial"},        {"phi", "initial"},      {"modes", "initial"},   {"axis", "initial"},
      {"pitch", "initial"},      {"kmax", "initial"},     {"contrast", "initial"}, {"seed", "initial"},
      {"psi1", "initial"},       {"psi2", "initial"}};
  return m;
}

}  // namespace

Scenario load_scenario(const Config& cfg, std::optional<std::uint64_t> seed, const GridDefaults& gd) {
  Scenario sc;
  sc.name = cfg.text("scenario", "name", sc.name);
  sc.grid = load_grid(cfg, gd);
  sc.params = load_physics(cfg, sc.grid, sc.units);
  sc.fields = load_fields(cfg, sc.grid);
  sc.fields.lorentz_coupling = cfg.boolean("flags", "lorentz_coupling", false);
  sc.fields.zeeman_test_mode = cfg.boolean("flags", "zeeman_test_mode", false);
  sc.hydro.dealias = cfg.boolean("flags", "dealias", true);
  sc.hydro.renormalize_spin = cfg.boolean("flags", "renormalize_spin", true);
  sc.fields.validate(sc.grid);
  sc.initial = load_initial(cfg, seed);
  sc.integrator = load_integrator(cfg, sc.hydro);
  sc.verify = load_verify(cfg);
  return sc;
}

SpinorField initial_spinor(const Scenario& sc) {
  const InitialSpec& s = sc.initial;
  const Grid& g = sc.grid;
  SpinorField psi;
  if (s.type == "gaussian") {
    psi = gaussian_spinor(g, s.sigma, s.k, s.eta, s.phi, s.center);
  } else if (s.type == "plane_wave") {
    psi = plane_wave_spinor(g, s.modes, s.eta, s.phi);
  } else if (s.type == "spin_texture") {
    psi = helix_spinor(g, s.axis, s.pitch, s.eta == 0.0 ? std::numbers::pi / 2.0 : s.eta);
  } else if (s.type == "uniform") {
    psi = uniform_spinor(g, s.eta, s.phi);
  } else if (s.type == "random") {
    psi = random_spinor(g, s.seed, s.kmax, s.contrast);
  } else {
    ComplexField c1 = snapshot_complex(read_snapshot(s.psi1));
    ComplexField c2 = snapshot_complex(read_snapshot(s.psi2));
    require_same_grid(c1.grid(), g, "initial.psi1");
    require_same_grid(c2.grid(), g, "initial.psi2");
    psi = SpinorField{std::move(c1), std::move(c2)};
  }
  require_finite(psi.psi1, "initial spinor");
  require_finite(psi.psi2, "initial spinor");
  if (!(psi.norm() > 0.0)) throw ConfigError("initial: the spinor vanishes identically");
  return psi;
}

namespace {

HydroState initial_hydro(const Scenario& sc, const SpinorField& psi) {
  HydroState h = forward_transform(psi, sc.fields.A(0.0), sc.params, VacuumPolicy::permit);
  fill_vacuum(h, sc.hydro);
  return h;
}

std::function<double(const Vec3&)> gaussian_profile(double width) {
  if (width == 0.0) return {};
  return [width](const Vec3& x) {
    return std::exp(-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / (2.0 * width * width));
  };
}

}  // namespace

PlasmaState load_plasma(const Config& cfg, const Scenario& base, std::optional<std::uint64_t> seed) {
  PlasmaState pl;
  const auto sections = cfg.sections("plasma.species.");
  if (sections.empty()) throw ConfigError("plasma: at least one [plasma.species.k] section is required");
  std::size_t index = 0;
  for (const auto& sec : sections) {
    Config local = cfg;
    for (const auto& [key, home] : species_keys()) {
      if (auto v = cfg.raw(sec, key)) local.set(home + "." + key + "=" + *v);
    }
    const std::string name = cfg.text(sec, "name", sec.substr(std::string("plasma.species.").size()));
    std::optional<std::uint64_t> sd;
    if (seed) sd = *seed + index;
    Scenario sc = load_scenario(local, sd);
    sc.fields = base.fields;
    if (sc.grid != base.grid) sc.fields = load_fields(local, sc.grid);
    sc.fields.lorentz_coupling = base.fields.lorentz_coupling;
    sc.fields.zeeman_test_mode = base.fields.zeeman_test_mode;
    sc.fields.validate(sc.grid);
    SpinorField psi = initial_spinor(sc);
    pl.species.push_back({name, initial_hydro(sc, psi), sc.params, sc.fields});
    ++index;
  }
  const std::string kind = cfg.text("plasma.interaction", "kind", "none");
  pl.kernel.J = cfg.number("plasma.interaction", "J", 0.0);
  pl.kernel.c = cfg.number("plasma.interaction", "c", 0.0);
  const double width = cfg.number("plasma.interaction", "width", 0.0);
  if (!(width >= 0.0)) throw ConfigError("plasma.interaction.width must be non-negative");
  if (kind == "none") {
    pl.kernel.kind = InteractionKernel::Kind::none;
  } else if (kind == "constant") {
    pl.kernel.kind = InteractionKernel::Kind::constant;
  } else if (kind == "separable") {
    pl.kernel.kind = InteractionKernel::Kind::separable;
    pl.kernel.g = gaussian_profile(width);
  } else if (kind == "local") {
    if (width == 0.0) throw ConfigError("plasma.interaction.width must be positive for a local kernel");
    pl.kernel.kind = InteractionKernel::Kind::local;
    pl.kernel.w = gaussian_profile(width);
  } else {
    throw ConfigError(fmt::format("plasma.interaction.kind: unknown kernel '{}'", kind));
  }
  validate_plasma(pl);
  return pl;
}

namespace {

std::string num(double v) { return fmt::format("{:.17g}", v); }

class Csv {
 public:
  Csv(const fs::path& path, const std::vector<std::string>& header) : out_(path, std::ios::binary) {
    if (!out_) throw ConfigError(fmt::format("output: cannot write '{}'", path.string()));
    out_ << fmt::format("{}\n", fmt::join(header, ","));
  }
  void row(const std::vector<std::string>& cells) { out_ << fmt::format("{}\n", fmt::join(cells, ",")); }
  void row(const std::vector<double>& cells) {
    std::vector<std::string> s;
    s.reserve(cells.size());
    for (double v : cells) s.push_back(num(v));
    row(s);
  }

 private:
  std::ofstream out_;
};

struct Context {
  const Config& cfg;
  const Scenario& sc;
  fs::path dir;
  bool quiet;

  template <typename... Args>
  void log(fmt::format_string<Args...> f, Args&&... args) const {
    if (!quiet) std::cerr << fmt::format(f, std::forward<Args>(args)...) << '\n';
  }
  fs::path snapshot(long long index, const std::string& field) const {
    fs::create_directories(dir / "snapshots");
    return dir / "snapshots" / fmt::format("{:04d}.{}", index, field);
  }
  std::string t() const { return fmt::format("time [{}]", sc.units.time); }
  std::string e(const std::string& name) const { return fmt::format("{} [{}]", name, sc.units.energy); }
};

bool due(long long step, long long every, long long last) { return step % every == 0 || step == last; }

bool snapshot_due(long long step, long long every, long long last) {
  return step == 0 || step == last || (every > 0 && step % every == 0);
}

int simulate_pauli(const Context& cx) {
  const Scenario& sc = cx.sc;
  const long long n = sc.integrator.steps();
  const double dt = sc.integrator.dt;
  SpinorField psi = initial_spinor(sc);
  Csv diag(cx.dir / "diagnostics.csv",
           {"step [1]", cx.t(), "norm [1]", cx.e("energy"), cx.e("kinetic"), cx.e("potential"), cx.e("zeeman"),
            "spin_x [1]", "spin_y [1]", "spin_z [1]"});
  long long snap = 0;
  for (long long k = 0;; ++k) {
    const double t = k * dt;
    if (due(k, sc.integrator.output_every, n)) {
      require_finite(psi.psi1, "psi1");
      require_finite(psi.psi2, "psi2");
      PauliEnergy en = pauli_energy_terms(psi, sc.fields, sc.params, t);
      Vec3 S = spin_expectation(psi);
      diag.row({double(k), t, psi.norm(), en.total(), en.kinetic, en.potential, en.zeeman, S[0], S[1], S[2]});
    }
    if (snapshot_due(k, sc.integrator.snapshot_every, n)) {
      write_snapshot(cx.snapshot(snap, "psi1"), "psi1", t, psi.psi1, sc.units.length + "^(-d/2)");
      write_snapshot(cx.snapshot(snap, "psi2"), "psi2", t, psi.psi2, sc.units.length + "^(-d/2)");
      write_snapshot(cx.snapshot(snap, "rho"), "rho", t, psi.density(), sc.units.length + "^(-d)");
      ++snap;
    }
    if (k == n) break;
    psi = step_pauli(psi, sc.fields, sc.params, t, dt);
  }
  cx.log("simulate-pauli: {} steps, final norm {:.12g}", n, psi.norm());
  return kExitOk;
}

int simulate_hydro(const Context& cx) {
  const Scenario& sc = cx.sc;
  const long long n = sc.integrator.steps();
  const double dt = sc.integrator.dt;
  HydroState h0 = initial_hydro(sc, initial_spinor(sc));
  BreakdownMonitor monitor(h0.rho, sc.params, sc.hydro);
  AmplitudeState st = to_amplitude(h0);
  Csv diag(cx.dir / "diagnostics.csv",
           {"step [1]", cx.t(), "mass [1]", cx.e("energy"), "spin_drift [1]", "projection_change [1]",
            "moment_x [1]", "moment_y [1]", "moment_z [1]"});
  long long snap = 0;
  StepInfo worst;
  for (long long k = 0;; ++k) {
    const double t = k * dt;
    HydroState h = from_amplitude(st);
    monitor.check(h.rho);
    if (due(k, sc.integrator.output_every, n)) {
      Vec3 M = integrate(h.rho * h.s);
      diag.row({double(k), t, h.mass(), total_energy(h, sc.fields, sc.params, t), worst.spin_drift,
                worst.projection_change, M[0], M[1], M[2]});
      worst = {};
    }
    if (snapshot_due(k, sc.integrator.snapshot_every, n)) {
      write_snapshot(cx.snapshot(snap, "rho"), "rho", t, h.rho, sc.units.length + "^(-d)");
      write_snapshot(cx.snapshot(snap, "u"), "u", t, h.u, sc.units.length + "/" + sc.units.time);
      write_snapshot(cx.snapshot(snap, "s"), "s", t, h.s, "1");
      ++snap;
    }
    if (k == n) break;
    StepInfo info;
    step_amplitude(st, sc.fields, sc.params, t, dt, sc.hydro, &info);
    worst.spin_drift = std::max(worst.spin_drift, info.spin_drift);
    worst.projection_change = std::max(worst.projection_change, info.projection_change);
  }
  cx.log("simulate-hydro: {} steps", n);
  return kExitOk;
}

int compare(const Context& cx) {
  const Scenario& sc = cx.sc;
  ErrorReport rep = correspondence_error(initial_spinor(sc), sc.fields, sc.params, sc.integrator.t_final,
                                         sc.integrator.dt, sc.hydro, sc.integrator.samples);
  Csv diag(cx.dir / "diagnostics.csv", {cx.t(), "err_rho [1]", "err_u [1]", "err_s [1]"});
  for (const auto& r : rep.rows) diag.row({r.time, r.rho, r.u, r.s});
  if (!rep.complete) {
    cx.log("compare: breakdown at t = {}: {}", rep.breakdown_time, rep.failure);
    return kExitBreakdown;
  }
  const ErrorRow& last = rep.rows.back();
  cx.log("compare: final err_rho {:.3e} err_u {:.3e} err_s {:.3e}", last.rho, last.u, last.s);
  const double tol = sc.verify.compare_tolerance;
  return (last.rho < tol && last.u < tol && last.s < tol) ? kExitOk : kExitVerification;
}

int reconstruct(const Context& cx) {
  const Scenario& sc = cx.sc;
  SpinorField psi = initial_spinor(sc);
  const Vec3 A = sc.fields.A(0.0);
  HydroState h = forward_transform(psi, A, sc.params);
  Vec3 w = winding_numbers(h, A, sc.params);
  SpinorField back = reconstruct_spinor(h, A, sc.params);
  double theta = 0.0;
  const double err = phase_aligned_error(psi, back, &theta);
  Csv diag(cx.dir / "diagnostics.csv",
           {"l2_error [1]", "phase [rad]", "winding_0 [1]", "winding_1 [1]", "winding_2 [1]", "tolerance [1]"});
  diag.row({err, theta, w[0], w[1], w[2], sc.verify.reconstruct_tolerance});
  write_snapshot(cx.snapshot(0, "psi1"), "psi1", 0.0, back.psi1, sc.units.length + "^(-d/2)");
  write_snapshot(cx.snapshot(0, "psi2"), "psi2", 0.0, back.psi2, sc.units.length + "^(-d/2)");
  cx.log("reconstruct: L2 error {:.3e}, winding ({}, {}, {})", err, w[0], w[1], w[2]);
  return err < sc.verify.reconstruct_tolerance ? kExitOk : kExitVerification;
}

bool pauli_comparable(const PhysParams& p) {
  return p.kappa_s == 1.0 && p.c_g == 1.0 && !p.pressure.active();
}

int energy_audit(const Context& cx) {
  const Scenario& sc = cx.sc;
  const long long n = sc.integrator.steps();
  const double dt = sc.integrator.dt;
  SpinorField psi = initial_spinor(sc);
  HydroState h0 = initial_hydro(sc, psi);
  BreakdownMonitor monitor(h0.rho, sc.params, sc.hydro);
  AmplitudeState st = to_amplitude(h0);
  const bool with_pauli = pauli_comparable(sc.params);
  std::vector<std::string> header{"step [1]",           cx.t(),           cx.e("kinetic"),
                                  cx.e("electrostatic"), cx.e("external"), cx.e("internal"),
                                  cx.e("quantum"),       cx.e("spin_gradient"), cx.e("zeeman"),
                                  cx.e("total"),         "relative_drift [1]"};
  if (with_pauli) header.push_back(cx.e("pauli_total"));
  Csv diag(cx.dir / "diagnostics.csv", header);
  double e0 = 0.0;
  for (long long k = 0;; ++k) {
    const double t = k * dt;
    HydroState h = from_amplitude(st);
    monitor.check(h.rho);
    if (due(k, sc.integrator.output_every, n)) {
      EnergyTerms e = energy_terms(h, sc.fields, sc.params);
      if (k == 0) e0 = e.total();
      std::vector<double> row{double(k),   t,          e.kinetic, e.electrostatic, e.external,
                              e.internal,  e.quantum,  e.spin_gradient, e.zeeman,  e.total(),
                              std::abs(e.total() - e0) / std::max(std::abs(e0), 1e-300)};
      if (with_pauli) row.push_back(pauli_energy(psi, sc.fields, sc.params, t));
      diag.row(row);
    }
    if (k == n) break;
    step_amplitude(st, sc.fields, sc.params, t, dt, sc.hydro);
    if (with_pauli) psi = step_pauli(psi, sc.fields, sc.params, t, dt);
  }
  cx.log("energy-audit: {} steps", n);
  return kExitOk;
}

int plasma(const Context& cx, std::optional<std::uint64_t> seed) {
  const Scenario& sc = cx.sc;
  const long long n = sc.integrator.steps();
  const double dt = sc.integrator.dt;
  PlasmaState pl = load_plasma(cx.cfg, sc, seed);
  std::vector<BreakdownMonitor> monitors;
  for (const auto& s : pl.species) monitors.emplace_back(s.state.rho, s.params, sc.hydro);
  std::vector<std::string> header{"step [1]", cx.t(), cx.e("H_total"), cx.e("interaction"), "relative_drift [1]",
                                  "moment_x [1]", "moment_y [1]", "moment_z [1]"};
  for (const auto& s : pl.species) header.push_back(fmt::format("mass_{} [1]", s.name));
  Csv diag(cx.dir / "diagnostics.csv", header);
  double h0 = 0.0;
  long long snap = 0;
  for (long long k = 0;; ++k) {
    const double t = k * dt;
    for (std::size_t i = 0; i < pl.species.size(); ++i) monitors[i].check(pl.species[i].state.rho);
    if (due(k, sc.integrator.output_every, n)) {
      double H = total_plasma_energy(pl);
      double own = 0.0;
      for (const auto& s : pl.species) own += total_energy(s.state, s.fields, s.params, t);
      if (k == 0) h0 = H;
      Vec3 M = total_spin_moment(pl);
      std::vector<double> row{double(k), t, H, H - own, std::abs(H - h0) / std::max(std::abs(h0), 1e-300),
                              M[0], M[1], M[2]};
      for (const auto& s : pl.species) row.push_back(s.state.mass());
      diag.row(row);
    }
    if (snapshot_due(k, sc.integrator.snapshot_every, n)) {
      for (const auto& s : pl.species) {
        write_snapshot(cx.snapshot(snap, "rho_" + s.name), "rho_" + s.name, t, s.state.rho,
                       sc.units.length + "^(-d)");
        write_snapshot(cx.snapshot(snap, "u_" + s.name), "u_" + s.name, t, s.state.u,
                       sc.units.length + "/" + sc.units.time);
        write_snapshot(cx.snapshot(snap, "s_" + s.name), "s_" + s.name, t, s.state.s, "1");
      }
      ++snap;
    }
    if (k == n) break;
    pl = step_plasma(pl, dt, sc.hydro);
  }
  if (pl.species.size() == 2) {
    try {
      ProductReport r = assemble_product_diagnostics(pl, sc.hydro);
      Csv prod(cx.dir / "product_report.csv",
               {cx.t(), "points [1]", "norm_defect [1]", "continuity_residual [1]", "momentum_residual [1]",
                "spin_residual [1]"});
      prod.row({pl.time, double(r.points), r.norm_defect, r.continuity_residual, r.momentum_residual,
                r.spin_residual});
    } catch (const BudgetError& e) {
      cx.log("plasma: product diagnostics skipped: {}", e.what());
    }
  }
  cx.log("plasma: {} species, {} steps", pl.species.size(), n);
  return kExitOk;
}

void write_suite(const fs::path& path, const std::vector<SuiteRow>& rows) {
  Csv csv(path, {"group", "state", "check", "max_residual [1]", "l2_residual [1]", "masked [points]",
                 "tolerance [1]", "pass"});
  for (const auto& r : rows)
    csv.row(std::vector<std::string>{r.group, r.state, r.check, num(r.residual), num(r.l2_residual),
                                     std::to_string(r.masked), num(r.tolerance), r.pass() ? "true" : "false"});
}

int verify(const Context& cx) {
  const Scenario& sc = cx.sc;
  auto identities = identity_suite(sc.grid, sc.params, sc.initial.seed, sc.verify.states);
  write_suite(cx.dir / "identity_report.csv", identities);
  cx.log("verify: {} identity checks", identities.size());
  auto structural = structural_suite(sc.grid, sc.params, sc.initial.seed, sc.verify.states);
  write_suite(cx.dir / "structural_report.csv", structural);
  cx.log("verify: {} structural checks", structural.size());

  std::map<std::string, std::pair<std::size_t, std::size_t>> groups;
  std::map<std::string, double> worst;
  std::size_t failures = 0;
  for (const auto* rows : {&identities, &structural}) {
    for (const auto& r : *rows) {
      auto& g = groups[r.group];
      ++g.first;
      if (!r.pass()) {
        ++g.second;
        ++failures;
        cx.log("verify: FAIL {} {} {}: {:.3e} >= {:.1e}", r.group, r.state, r.check, r.residual, r.tolerance);
      }
      worst[r.group] = std::max(worst[r.group], r.residual / r.tolerance);
    }
  }
  Csv diag(cx.dir / "diagnostics.csv", {"group", "checks [1]", "failures [1]", "worst_residual_over_tolerance [1]"});
  for (const auto& [name, g] : groups)
    diag.row(std::vector<std::string>{name, std::to_string(g.first), std::to_string(g.second), num(worst[name])});
  return failures == 0 ? kExitOk : kExitVerification;
}

GridDefaults grid_defaults(const std::string& subcommand) {
  if (subcommand == "verify") return {2, 64, 2.0 * std::numbers::pi};
  if (subcommand == "plasma") return {2, 32, 2.0 * std::numbers::pi};
  return {};
}

void write_manifest(const fs::path& dir, const std::string& subcommand, const RunOptions& opt, const Config& cfg,
                    const Scenario& sc) {
  std::ofstream out(dir / "manifest.txt", std::ios::binary);
  if (!out) throw ConfigError(fmt::format("output: cannot write '{}'", (dir / "manifest.txt").string()));
  out << fmt::format("spinfluid {}\n", SPINFLUID_VERSION);
  out << fmt::format("subcommand = {}\n", subcommand);
  out << fmt::format("seed = {}\n", sc.initial.seed);
  out << fmt::format("config = {}\n", opt.config ? opt.config->string() : "(defaults)");
  for (const auto& o : opt.overrides) out << fmt::format("override = {}\n", o);
  out << fmt::format("fftw = {}\n", fftw_version);
  out << fmt::format("fmt = {}\n", FMT_VERSION);
  out << fmt::format("compiler = {}\n", __VERSION__);
  out << fmt::format("cxx_standard = {}\n", __cplusplus);
  out << "\n# effective configuration\n" << cfg.echo();
}

}  // namespace

int run(const std::string& subcommand, const RunOptions& opt) {
  static const char* known[] = {"simulate-pauli", "simulate-hydro", "compare", "reconstruct",
                                "plasma",         "verify",         "energy-audit"};
  auto log_error = [&](const char* kind, const std::exception& e) {
    std::cerr << fmt::format("spinfluid {}: {}: {}\n", subcommand, kind, e.what());
  };
  try {
    if (std::find(std::begin(known), std::end(known), subcommand) == std::end(known))
      throw ConfigError(fmt::format("unknown subcommand '{}'", subcommand));
    Config cfg = opt.config ? Config::from_file(*opt.config) : Config();
    for (const auto& o : opt.overrides) cfg.set(o);
    Scenario sc = load_scenario(cfg, opt.seed, grid_defaults(subcommand));
    for (const auto& s : cfg.sections("")) {
      static const char* fixed[] = {"scenario", "grid", "physics", "fields", "initial",
                                    "integrator", "flags", "verify", "plasma.interaction"};
      bool ok = std::find(std::begin(fixed), std::end(fixed), s) != std::end(fixed) ||
                s.rfind("plasma.species.", 0) == 0;
      if (!ok) throw ConfigError(fmt::format("unknown config section [{}]", s));
    }
    fs::create_directories(opt.output);
    Context cx{cfg, sc, opt.output, opt.quiet};
    int code = kExitOk;
    if (subcommand == "plasma") {
      PlasmaState probe = load_plasma(cfg, sc, opt.seed);
      (void)probe;
      cfg.require_all_used();
    } else {
      for (const auto& s : cfg.sections("plasma.")) {
        for (const auto& key : {"name", "kind", "J", "c", "width"}) (void)cfg.raw(s, key);
        for (const auto& [key, home] : species_keys()) (void)cfg.raw(s, key);
      }
      cfg.require_all_used();
    }
    write_manifest(opt.output, subcommand, opt, cfg, sc);
    cx.log("spinfluid {}: scenario '{}', output '{}'", subcommand, sc.name, opt.output.string());
    if (subcommand == "simulate-pauli") code = simulate_pauli(cx);
    else if (subcommand == "simulate-hydro") code = simulate_hydro(cx);
    else if (subcommand == "compare") code = compare(cx);
    else if (subcommand == "reconstruct") code = reconstruct(cx);
    else if (subcommand == "plasma") code = plasma(cx, opt.seed);
    else if (subcommand == "verify") code = verify(cx);
    else code = energy_audit(cx);
    return code;
  } catch (const ConfigError& e) {
    log_error("config error", e);
    return kExitConfig;
  } catch (const BudgetError& e) {
    log_error("config error", e);
    return kExitConfig;
  } catch (const Error& e) {
    log_error("numerical breakdown", e);
    return kExitBreakdown;
  } catch (const fs::filesystem_error& e) {
    log_error("output error", e);
    return kExitConfig;
  }
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Pauli spinor and spin-fluid solvers with correspondence checks"};
  app.require_subcommand(1);
  RunOptions opt;
  std::string config;
  std::string output = "out";
  std::uint64_t seed = 0;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config, "INI scenario file")->check(CLI::ExistingFile);
    sub->add_option("--set", opt.overrides, "Override SECTION.KEY=VALUE (repeatable)")->take_all();
    sub->add_option("--output", output, "Output directory");
    sub->add_option("--seed", seed, "Seed for random initial states");
    sub->add_flag("--quiet", opt.quiet, "Suppress progress messages");
  };
  const std::pair<const char*, const char*> subs[] = {
      {"simulate-pauli", "Evolve the Pauli spinor"},
      {"simulate-hydro", "Evolve the spin-fluid equations"},
      {"compare", "Evolve both and report their differences over time"},
      {"reconstruct", "Spinor to fluid to spinor round trip"},
      {"plasma", "Evolve interacting spin-fluid species"},
      {"verify", "Identity, structural and antisymmetry suites"},
      {"energy-audit", "Time series of every energy term"}};
  for (const auto& [name, help] : subs) add_common(app.add_subcommand(name, help));
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  CLI::App* sub = app.get_subcommands().front();
  if (!config.empty()) opt.config = config;
  opt.output = output;
  if (sub->count("--seed")) opt.seed = seed;
  return run(sub->get_name(), opt);
}

}  // namespace sf
