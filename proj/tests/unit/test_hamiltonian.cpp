#include <doctest.h>

#include <cmath>

#include "spinfluid/hamiltonian.hpp"
#include "spinfluid/random.hpp"
#include "spinfluid/scenarios.hpp"
#include "spinfluid/spectral.hpp"
#include "support.hpp"

using namespace sf;
using test::kPi;
using test::max_diff;

namespace {

struct Regime {
  FieldConfig f;
  PhysParams p;
};

Regime potentials(const Grid& g, std::uint64_t seed) {
  Regime r;
  CounterRng rng(seed, 5);
  r.f.phi = unit_random_field(g, rng, 2);
  r.p.V = unit_random_field(g, rng, 2);
  r.p.pressure.kind = PressureLaw::Kind::polytropic;
  r.p.pressure.K = 0.2;
  r.p.pressure.gamma = 5.0 / 3.0;
  r.p.mass = 1.3;
  r.p.hbar = 0.9;
  return r;
}

const TestFunctional& find(const std::vector<TestFunctional>& fs, const std::string& name) {
  for (const auto& f : fs)
    if (f.name == name) return f;
  FAIL("missing functional " << name);
  return fs.front();
}

}  // namespace

TEST_CASE("energy terms add up to the total and match closed forms") {
  Grid g = Grid::square(32, 2.0 * kPi);
  Regime r = potentials(g, 1);
  HydroState st = random_hydro_state(g, 1);
  EnergyTerms e = energy_terms(st, r.f, r.p);
  CHECK(e.total() == doctest::Approx(total_energy(st, r.f, r.p)).epsilon(1e-13));
  CHECK(e.electrostatic == doctest::Approx(r.p.charge * integrate(r.f.phi * st.rho)).epsilon(1e-13));

  HydroState u{ScalarField(g, 2.0 / g.volume()), VectorField3(g, {0.3, 0.4, 0.0}), VectorField3(g, {0, 0, 1})};
  PhysParams p;
  p.mass = 2.0;
  EnergyTerms eu = energy_terms(u, FieldConfig{}, p);
  CHECK(eu.kinetic == doctest::Approx(0.5 * 2.0 * 2.0 * 0.25));
  CHECK(eu.quantum == doctest::Approx(0.0));
  CHECK(eu.spin_gradient == doctest::Approx(0.0));
}

TEST_CASE("bracket generates the fluid equations in every field regime") {
  Grid g = Grid::square(64, 2.0 * kPi);
  for (std::uint64_t seed : {2u, 3u}) {
    HydroState st = random_hydro_state(g, seed);
    Regime pot = potentials(g, seed);
    CHECK(rates_difference(bracket_rhs(st, pot.f, pot.p), hydro_rhs(st, pot.f, pot.p)) < 1e-8);

    FieldConfig a;
    a.a_mode = AMode::uniform;
    a.a0 = {0.1, 0.3, -0.2};
    a.a_rate = {0.4, -0.1, 0.2};
    PhysParams p;
    CHECK(rates_difference(bracket_rhs(st, a, p, 0.7), hydro_rhs(st, a, p, 0.7)) < 1e-8);

    FieldConfig z;
    z.zeeman_test_mode = true;
    CounterRng rng(seed, 9);
    z.b = VectorField3(g);
    for (int k = 0; k < 3; ++k) z.b[k] = unit_random_field(g, rng, 2);
    CHECK(rates_difference(bracket_rhs(st, z, p), hydro_rhs(st, z, p)) < 1e-8);
  }
}

TEST_CASE("bracket is antisymmetric and the mass is a Casimir") {
  Grid g = Grid::square(48, 2.0 * kPi);
  HydroState st = random_hydro_state(g, 4);
  PhysParams p;
  FieldConfig f;
  auto fs = test_functionals(g, 4, f, p);
  CHECK(fs.size() >= 6);
  for (const auto& F : fs)
    for (const auto& G : fs) {
      INFO(F.name << " " << G.name);
      CHECK(bracket_antisymmetry_check(st, F, G, {0, 0, 0}, p) < 1e-10);
    }
  const auto& M = find(fs, "mass");
  auto dM = M.derivatives(st);
  for (const auto& F : fs) {
    double scale = 0.0;
    const double b = poisson_bracket(st, dM, F.derivatives(st), {0, 0, 0}, p, &scale);
    CHECK(std::abs(b) <= 1e-12 * std::max(scale, 1.0));
  }
  const auto& H = find(fs, "energy");
  auto dH = H.derivatives(st);
  double scale = 0.0;
  const double self = poisson_bracket(st, dH, dH, {0, 0, 0}, p, &scale);
  CHECK(std::abs(self) <= 1e-12 * scale);
}

TEST_CASE("functional derivatives match finite differences of the functional") {
  Grid g = Grid::line(32, 2.0 * kPi);
  HydroState st = random_hydro_state(g, 6);
  PhysParams p;
  FieldConfig f;
  FunctionalDerivatives d = functional_derivatives(st, f, p);
  const double dV = g.cell_volume();
  for (std::size_t i : {std::size_t(3), std::size_t(17)}) {
    const double h = 1e-5;
    HydroState a = st, b = st;
    a.rho[i] += h * st.rho[i];
    b.rho[i] -= h * st.rho[i];
    double fd = (total_energy(a, f, p) - total_energy(b, f, p)) / (2 * h * st.rho[i] * dV);
    CHECK(d.drho[i] == doctest::Approx(fd).epsilon(1e-6));
    a = st;
    b = st;
    a.u[0][i] += h;
    b.u[0][i] -= h;
    fd = (total_energy(a, f, p) - total_energy(b, f, p)) / (2 * h * dV);
    CHECK(d.du[0][i] == doctest::Approx(p.mass * st.rho[i] * st.u[0][i]).epsilon(1e-12));
    CHECK(d.du[0][i] == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("momentum and spin-density variables round trip and give the same bracket") {
  Grid g = Grid::square(64, 2.0 * kPi);
  HydroState st = random_hydro_state(g, 7);
  PhysParams p;
  p.charge = 0.7;
  const Vec3 A{0.2, -0.1, 0.3};
  LiePoissonState lp = to_lie_poisson(st, A, p);
  HydroState back = from_lie_poisson(lp, A, p);
  CHECK(max_diff(back.u, st.u) < 1e-13);
  CHECK(max_diff(back.s, st.s) < 1e-13);
  auto fs = test_functionals(g, 7, FieldConfig{}, p);
  const auto& F = find(fs, "cubic");
  const auto& G = find(fs, "spin_weight");
  double b1 = poisson_bracket(st, F.derivatives(st), G.derivatives(st), A, p);
  double b2 = lie_poisson_bracket(lp, lie_poisson_derivatives(st, F.derivatives(st), A, p),
                                  lie_poisson_derivatives(st, G.derivatives(st), A, p));
  CHECK(b2 == doctest::Approx(b1).epsilon(1e-9));
}

TEST_CASE("structural check suite passes on a random state") {
  Grid g = Grid::square(64, 2.0 * kPi);
  Regime r = potentials(g, 8);
  auto rows = structural_checks(random_hydro_state(g, 8), r.f, r.p, 8);
  CHECK(rows.size() >= 10);
  for (const auto& row : rows) {
    INFO(row.name << " " << row.residual);
    CHECK(row.pass());
  }
}
