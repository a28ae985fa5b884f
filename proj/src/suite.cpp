#include "spinfluid/suite.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "spinfluid/hamiltonian.hpp"
#include "spinfluid/pauli.hpp"
#include "spinfluid/random.hpp"
#include "spinfluid/scenarios.hpp"

namespace sf {

double phase_aligned_error(const SpinorField& a, const SpinorField& b, double* theta) {
  require_same_grid(a.grid(), b.grid(), "phase_aligned_error");
  cplx overlap{0.0, 0.0};
  double na = 0.0;
  for (std::size_t i = 0; i < a.grid().points(); ++i) {
    overlap += std::conj(b.psi1[i]) * a.psi1[i] + std::conj(b.psi2[i]) * a.psi2[i];
    na += std::norm(a.psi1[i]) + std::norm(a.psi2[i]);
  }
  cplx rot = std::abs(overlap) > 0.0 ? overlap / std::abs(overlap) : cplx(1.0, 0.0);
  if (theta) *theta = std::arg(rot);
  double e = 0.0;
  for (std::size_t i = 0; i < a.grid().points(); ++i)
    e += std::norm(a.psi1[i] - rot * b.psi1[i]) + std::norm(a.psi2[i] - rot * b.psi2[i]);
  return na > 0.0 ? std::sqrt(e / na) : std::sqrt(e);
}

namespace {

VectorField3 random_vector_field(const Grid& g, CounterRng& rng) {
  VectorField3 v(g);
  for (int k = 0; k < 3; ++k) v[k] = unit_random_field(g, rng, 3);
  return v;
}

SuiteRow identity_row(const std::string& group, const std::string& state, const IdentityRow& r) {
  SuiteRow row{group, state, r.name, r.max_residual, r.l2_residual, r.masked,
               r.integral ? kIntegralTolerance : kPointwiseTolerance};
  return row;
}

double relative(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

std::vector<SuiteRow> identity_suite(const Grid& g, const PhysParams& p, std::uint64_t seed, int count) {
  std::vector<SuiteRow> rows;
  const Grid plane = Grid::square(g.size(0), g.length(0));
  PhysParams pe = p;
  pe.kappa_s = 1.0;
  pe.c_g = 1.0;
  pe.pressure = {};
  pe.V = {};
  for (int n = 0; n < count; ++n) {
    const std::uint64_t sd = seed + n;
    const std::string tag = fmt::format("seed{}", sd);
    SpinorField psi = random_spinor(g, sd);
    CounterRng rng(sd, 99);
    VectorField3 B = random_vector_field(g, rng);
    Vec3 A{rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)};
    for (const auto& r : verify_identities(psi, B, A, p).rows) rows.push_back(identity_row("identity", tag, r));

    HydroState sol = solenoidal_spin_state(plane, sd);
    for (const auto& r : verify_energy_split(sol, p).rows) {
      SuiteRow row = identity_row("energy_split", tag, r);
      if (r.name == "div_rho_s") row.tolerance = kIntegralTolerance;
      rows.push_back(row);
    }

    FieldConfig free;
    HydroState h = forward_transform(psi, free.A(0.0), pe);
    double ep = pauli_energy(psi, free, pe);
    rows.push_back({"energy_equality", tag, "free", relative(total_energy(h, free, pe), ep), 0.0, 0, kIntegralTolerance});
    FieldConfig zee;
    zee.zeeman_test_mode = true;
    zee.b = B;
    zee.phi = unit_random_field(g, rng, 3);
    ep = pauli_energy(psi, zee, pe);
    rows.push_back(
        {"energy_equality", tag, "zeeman_phi", relative(total_energy(h, zee, pe), ep), 0.0, 0, kIntegralTolerance});
    FieldConfig vec;
    vec.a_mode = AMode::uniform;
    vec.a0 = A;
    HydroState ha = forward_transform(psi, vec.A(0.0), pe);
    ep = pauli_energy(psi, vec, pe);
    rows.push_back(
        {"energy_equality", tag, "uniform_A", relative(total_energy(ha, vec, pe), ep), 0.0, 0, kIntegralTolerance});

    SpinorField back = reconstruct_spinor(ha, A, p);
    rows.push_back({"reconstruction", tag, "round_trip", phase_aligned_error(psi, back), 0.0, 0, kIntegralTolerance});
  }

  Index3 modes{1, g.dim() > 1 ? -2 : 0, 0};
  SpinorField wave = plane_wave_spinor(g, modes, 0.9, 0.4);
  SpinorField mod = random_spinor(g, seed + 1000, 2, 0.3, 0.5, 0.0);
  for (std::size_t i = 0; i < g.points(); ++i) {
    wave.psi1[i] *= std::abs(mod.psi1[i]) * std::sqrt(g.volume());
    wave.psi2[i] *= std::abs(mod.psi1[i]) * std::sqrt(g.volume());
  }
  HydroState hw = forward_transform(wave, {0.0, 0.0, 0.0}, p);
  Vec3 wn = winding_numbers(hw, {0.0, 0.0, 0.0}, p);
  double wdefect = std::abs(wn[0] - modes[0]) + std::abs(wn[1] - modes[1]) + std::abs(wn[2] - modes[2]);
  rows.push_back({"reconstruction", "winding", "winding_number", wdefect, 0.0, 0, 1e-8});
  rows.push_back({"reconstruction", "winding", "round_trip",
                  phase_aligned_error(wave, reconstruct_spinor(hw, {0.0, 0.0, 0.0}, p)), 0.0, 0,
                  kIntegralTolerance});
  return rows;
}

std::vector<SuiteRow> structural_suite(const Grid& g, const PhysParams& p, std::uint64_t seed, int count) {
  std::vector<SuiteRow> rows;
  for (int n = 0; n < count; ++n) {
    const std::uint64_t sd = seed + n;
    const std::string tag = fmt::format("seed{}", sd);
    HydroState st = random_hydro_state(g, sd);
    CounterRng rng(sd, 77);

    FieldConfig f1;
    f1.phi = unit_random_field(g, rng, 3);
    PhysParams p1 = p;
    p1.V = unit_random_field(g, rng, 3);
    p1.pressure.kind = PressureLaw::Kind::polytropic;
    p1.pressure.K = 0.1;
    p1.pressure.gamma = 2.0;

    FieldConfig f2;
    f2.a_mode = AMode::uniform;
    f2.a0 = {rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)};
    f2.a_rate = {rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)};

    FieldConfig f3;
    f3.zeeman_test_mode = true;
    f3.b = random_vector_field(g, rng);

    const std::pair<const char*, std::pair<const FieldConfig*, const PhysParams*>> regimes[] = {
        {"potentials", {&f1, &p1}}, {"uniform_A", {&f2, &p}}, {"zeeman", {&f3, &p}}};
    for (const auto& [name, fp] : regimes) {
      for (const auto& r : structural_checks(st, *fp.first, *fp.second, sd)) {
        rows.push_back({name, tag, r.name, r.residual, 0.0, 0, r.tolerance});
      }
    }
  }
  return rows;
}

}  // namespace sf
