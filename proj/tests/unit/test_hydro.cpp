#include <doctest.h>

#include <cmath>
#include <limits>

#include "spinfluid/errors.hpp"
#include "spinfluid/hydro.hpp"
#include "spinfluid/pauli.hpp"
#include "spinfluid/random.hpp"
#include "spinfluid/scenarios.hpp"
#include "spinfluid/spectral.hpp"
#include "support.hpp"

using namespace sf;
using test::kPi;
using test::max_diff;

namespace {

HydroState uniform_state(const Grid& g, const Vec3& u, const Vec3& s) {
  return {ScalarField(g, 1.0 / g.volume()), VectorField3(g, u), VectorField3(g, s)};
}

double rel(const ScalarField& a, const ScalarField& b) { return max_diff(a, b) / std::max(b.max_abs(), 1e-300); }
double rel(const VectorField3& a, const VectorField3& b) {
  double s = std::max({b[0].max_abs(), b[1].max_abs(), b[2].max_abs(), 1e-300});
  return max_diff(a, b) / s;
}

HydroState rk4_evolve(HydroState h, const FieldConfig& f, const PhysParams& p, double dt, int steps,
                      const HydroOptions& o) {
  for (int k = 0; k < steps; ++k) h = step_hydro(h, f, p, k * dt, dt, o);
  return h;
}

}  // namespace

TEST_CASE("uniform states are equilibria") {
  Grid g = Grid::square(16, 2.0 * kPi);
  PhysParams p;
  p.pressure.kind = PressureLaw::Kind::polytropic;
  p.pressure.K = 0.3;
  HydroState h = uniform_state(g, {0.4, -0.2, 0.1}, {0.6, 0.0, 0.8});
  HydroRates r = hydro_rhs(h, FieldConfig{}, p);
  CHECK(r.drho.max_abs() < 1e-14);
  CHECK(max_diff(r.du, VectorField3(g)) < 1e-13);
  CHECK(max_diff(r.ds, VectorField3(g)) < 1e-13);
}

TEST_CASE("uniform field produces Larmor torque and no force") {
  Grid g = Grid::line(8, 2.0 * kPi);
  PhysParams p;
  p.charge = 1.3;
  p.mass = 0.7;
  p.kappa_s = 1.2;
  FieldConfig f;
  f.zeeman_test_mode = true;
  const double B0 = 0.9;
  f.b = VectorField3(g, {0.0, 0.0, B0});
  const Vec3 s{0.48, 0.6, 0.64};
  HydroRates r = hydro_rhs(uniform_state(g, {0, 0, 0}, s), f, p);
  const double w = p.kappa_s * p.charge * B0 / p.mass;
  CHECK(max_diff(r.ds, VectorField3(g, {w * s[1], -w * s[0], 0.0})) < 1e-13);
  CHECK(max_diff(r.du, VectorField3(g)) < 1e-13);
}

TEST_CASE("field gradient produces the Stern-Gerlach acceleration") {
  Grid g = Grid::line(32, 2.0 * kPi);
  PhysParams p;
  p.hbar = 0.9;
  p.mass = 1.1;
  FieldConfig f;
  f.zeeman_test_mode = true;
  f.b = VectorField3::sample(g, [](const Vec3& x) { return Vec3{0.0, 0.0, 1.0 + 0.3 * std::sin(x[0])}; });
  HydroRates r = hydro_rhs(uniform_state(g, {0, 0, 0}, {0, 0, 1}), f, p);
  auto expect = VectorField3::sample(g, [&](const Vec3& x) {
    return Vec3{p.charge * p.hbar / (2 * p.mass * p.mass) * 0.3 * std::cos(x[0]), 0.0, 0.0};
  });
  CHECK(max_diff(r.du, expect) < 1e-13);
  CHECK(max_diff(r.ds, VectorField3(g)) < 1e-13);
}

TEST_CASE("constant spin reduces the system to the spinless Madelung equations") {
  Grid g = Grid::square(64, 2.0 * kPi);
  PhysParams p;
  p.hbar = 0.8;
  CounterRng rng(21);
  ScalarField lr = random_bandlimited(g, rng, 2, 0.5);
  ScalarField chi = random_bandlimited(g, rng, 2, 0.5);
  HydroState h{ScalarField(g), gradient(chi), VectorField3(g, {0.0, 0.0, 1.0})};
  for (std::size_t i = 0; i < g.points(); ++i) h.rho[i] = std::exp(lr[i]);
  HydroRates r = hydro_rhs(h, FieldConfig{}, p);

  VectorField3 flux = h.u;
  flux *= h.rho;
  CHECK(rel(r.drho, -1.0 * divergence(flux)) < 1e-12);
  VectorField3 expect = -1.0 * advective_derivative(h.u, h.u) - (1.0 / p.mass) * gradient(quantum_potential(h.rho, p));
  CHECK(rel(r.du, expect) < 1e-10);
  CHECK(max_diff(r.ds, VectorField3(g)) < 1e-13);
}

TEST_CASE("fluid rates equal the time derivative of the transformed Pauli flow") {
  Grid g = Grid::square(48, 2.0 * kPi);
  PhysParams p;
  FieldConfig f;
  f.zeeman_test_mode = true;
  f.b = VectorField3::sample(g, [](const Vec3& x) {
    return Vec3{0.2 * std::cos(x[1]), 0.1, 1.0 + 0.3 * std::sin(x[0])};
  });
  f.phi = ScalarField::sample(g, [](const Vec3& x) { return 0.3 * std::cos(x[0] + x[1]); });
  p.V = ScalarField::sample(g, [](const Vec3& x) { return 0.2 * std::sin(2 * x[1]); });
  SpinorField psi = random_spinor(g, 4, 2, 0.3, 0.6, 0.5);
  const double dt = 1e-4;
  HydroState plus = forward_transform(step_pauli(psi, f, p, 0.0, dt), {0, 0, 0}, p);
  HydroState minus = forward_transform(step_pauli(psi, f, p, 0.0, -dt), {0, 0, 0}, p);
  HydroRates r = hydro_rhs(forward_transform(psi, {0, 0, 0}, p), f, p);
  auto fd = [&](const ScalarField& a, const ScalarField& b) { return (1.0 / (2 * dt)) * (a - b); };
  CHECK(rel(r.drho, fd(plus.rho, minus.rho)) < 1e-6);
  for (int k = 0; k < 3; ++k) {
    CHECK(rel(r.du[k], fd(plus.u[k], minus.u[k])) < 1e-6);
    CHECK(rel(r.ds[k], fd(plus.s[k], minus.s[k])) < 1e-6);
  }
}

TEST_CASE("RK4 hydro step converges at fourth order") {
  Grid g = Grid::line(64, 2.0 * kPi);
  PhysParams p;
  HydroState h0 = forward_transform(random_spinor(g, 8, 2, 0.3, 0.6, 0.5), {0, 0, 0}, p);
  HydroOptions o;
  o.dealias = false;
  o.renormalize_spin = false;
  o.spin_drift_limit = 1.0;
  const double T = 0.05;
  HydroState ref = rk4_evolve(h0, FieldConfig{}, p, T / 320, 320, o);
  double e1 = max_diff(rk4_evolve(h0, FieldConfig{}, p, T / 10, 10, o).u, ref.u);
  double e2 = max_diff(rk4_evolve(h0, FieldConfig{}, p, T / 20, 20, o).u, ref.u);
  CHECK(e1 / e2 > 12.0);
  CHECK(e1 / e2 < 20.0);
}

TEST_CASE("mass is conserved and the spin stays on the unit sphere") {
  Grid g = Grid::square(32, 2.0 * kPi);
  PhysParams p;
  HydroState h = forward_transform(random_spinor(g, 9, 2, 0.3, 0.6, 0.5), {0, 0, 0}, p);
  const double m0 = h.mass();
  StepInfo info;
  double drift = 0.0;
  for (int k = 0; k < 50; ++k) {
    h = step_hydro(h, FieldConfig{}, p, k * 1e-3, 1e-3, {}, &info);
    drift = std::max(drift, info.spin_drift);
  }
  CHECK(std::abs(h.mass() - m0) < 1e-12);
  CHECK(drift < 1e-6);
  CHECK(h.spin_norm_defect() < 1e-14);
}

TEST_CASE("breakdowns raise typed errors") {
  Grid g = Grid::line(16, 2.0 * kPi);
  PhysParams p;
  HydroState h = forward_transform(random_spinor(g, 1, 2), {0, 0, 0}, p);
  HydroState bad = h;
  bad.u[0][4] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(hydro_rhs(bad, FieldConfig{}, p), NonFiniteError);
  bad = h;
  bad.s.set(2, {2.0, 0.0, 0.0});
  CHECK_THROWS_AS(hydro_rhs(bad, FieldConfig{}, p), InvariantError);
  HydroOptions strict;
  strict.spin_drift_limit = 1e-300;
  CHECK_THROWS_AS(step_hydro(h, FieldConfig{}, p, 0.0, 0.1, strict), InvariantError);
  CHECK_THROWS_AS(step_hydro(h, FieldConfig{}, p, 0.0, -0.1), ConfigError);
  FieldConfig inconsistent;
  inconsistent.b = VectorField3(g, {0, 0, 1});
  CHECK_THROWS_AS(hydro_rhs(h, inconsistent, p), ConfigError);

  BreakdownMonitor mon(h.rho, p, {});
  CHECK(mon.baseline() == 0);
  ScalarField drained = h.rho;
  drained[0] = drained[1] = 0.0;
  CHECK_THROWS_AS(mon.check(drained), VacuumError);
  CHECK_NOTHROW(mon.check(h.rho));
}

TEST_CASE("vacuum filling uses density-weighted means") {
  Grid g = Grid::line(8, 1.0);
  HydroState h{ScalarField(g, 1.0), VectorField3(g, {1.0, 0.0, 0.0}), VectorField3(g, {0.0, 0.0, 1.0})};
  h.rho[2] = 0.0;
  h.u.set(2, {9.0, 9.0, 9.0});
  h.s.set(2, {1.0, 0.0, 0.0});
  CHECK(fill_vacuum(h, {}) == 1);
  CHECK(h.u[0][2] == doctest::Approx(1.0));
  CHECK(h.u[1][2] == doctest::Approx(0.0));
  CHECK(h.s[2][2] == doctest::Approx(1.0));
  ScalarField w = vacuum_weight(h.rho, {});
  CHECK(w[2] == 0.0);
  CHECK(w[0] == 1.0);
}

TEST_CASE("state error metrics") {
  Grid g = Grid::line(16, 1.0);
  HydroState a{ScalarField(g, 1.0), VectorField3(g, {1.0, 0.0, 0.0}), VectorField3(g, {0.0, 0.0, 1.0})};
  ErrorRow same = state_error(a, a);
  CHECK(same.rho == 0.0);
  CHECK(same.u == 0.0);
  HydroState b = a;
  b.rho *= 1.01;
  b.u = VectorField3(g, {1.02, 0.0, 0.0});
  ErrorRow e = state_error(a, b);
  CHECK(e.rho == doctest::Approx(0.01));
  CHECK(e.u == doctest::Approx(0.02));
  CHECK(e.s == 0.0);
}

TEST_CASE("correspondence on a smooth textured spinor") {
  Grid g = Grid::square(32, 2.0 * kPi);
  PhysParams p;
  ErrorReport rep = correspondence_error(random_spinor(g, 12, 2, 0.3, 0.6, 0.5), FieldConfig{}, p, 0.02, 1e-3, {}, 4);
  CHECK(rep.complete);
  CHECK(rep.rows.size() == 5);
  CHECK(rep.rows.front().time == 0.0);
  CHECK(rep.rows.back().time == doctest::Approx(0.02));
  CHECK(rep.max_rho() < 1e-6);
  CHECK(rep.max_u() < 1e-5);
  CHECK(rep.max_s() < 1e-5);
  CHECK_THROWS_AS(correspondence_error(random_spinor(g, 12), FieldConfig{}, p, 0.0205, 1e-3), ConfigError);
}
