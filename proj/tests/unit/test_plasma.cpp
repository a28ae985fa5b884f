#include <doctest.h>

#include <cmath>

#include "spinfluid/errors.hpp"
#include "spinfluid/hamiltonian.hpp"
#include "spinfluid/plasma.hpp"
#include "spinfluid/scenarios.hpp"
#include "spinfluid/spectral.hpp"
#include "support.hpp"

using namespace sf;
using test::kPi;
using test::max_diff;

namespace {

Species make(const std::string& name, const SpinorField& psi, const PhysParams& p = {}) {
  return {name, forward_transform(psi, {0, 0, 0}, p), p, FieldConfig{}};
}

PlasmaState pair(const Grid& g, InteractionKernel::Kind kind, double J) {
  PlasmaState pl;
  pl.species.push_back(make("a", random_spinor(g, 31, 1, 0.3, 0.6, 0.4)));
  PhysParams heavy;
  heavy.mass = 1.5;
  pl.species.push_back(make("b", random_spinor(g, 32, 1, 0.3, 0.6, 0.4), heavy));
  pl.kernel.kind = kind;
  pl.kernel.J = J;
  pl.kernel.g = [](const Vec3& x) { return std::exp(-(x[0] * x[0] + x[1] * x[1]) / 2.0); };
  pl.kernel.w = [](const Vec3& x) { return std::exp(-(x[0] * x[0] + x[1] * x[1])); };
  return pl;
}

double rel_drift(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("constant kernel gives (N - 1) c for normalized species") {
  Grid g = Grid::square(8, 2.0 * kPi);
  PlasmaState pl;
  for (int i = 0; i < 3; ++i) pl.species.push_back(make("s" + std::to_string(i), random_spinor(g, 40 + i, 1)));
  pl.kernel.kind = InteractionKernel::Kind::constant;
  pl.kernel.c = 0.25;
  for (std::size_t i = 0; i < 3; ++i) {
    MeanField mf = mean_field_potential(pl, i);
    CHECK(max_diff(mf.phi, ScalarField(g, 0.5)) < 1e-14);
    CHECK(max_diff(mf.grad_phi, VectorField3(g)) < 1e-14);
  }
}

TEST_CASE("separable kernel mean field contracts the other species' moment") {
  Grid g = Grid::square(16, 2.0 * kPi);
  PlasmaState pl = pair(g, InteractionKernel::Kind::separable, 0.1);
  const auto& b = pl.species[1].state;
  Vec3 m{0, 0, 0};
  for (std::size_t i = 0; i < g.points(); ++i) {
    double w = b.rho[i] * pl.kernel.g(g.position(i)) * g.cell_volume();
    for (int k = 0; k < 3; ++k) m[k] += w * b.s[k][i];
  }
  MeanField mf = mean_field_potential(pl, 0);
  const auto& a = pl.species[0].state;
  for (std::size_t i = 0; i < g.points(); i += 7) {
    double gi = pl.kernel.g(g.position(i));
    Vec3 D{-0.1 * gi * m[0], -0.1 * gi * m[1], -0.1 * gi * m[2]};
    CHECK(mf.dphi_ds.at(i)[0] == doctest::Approx(D[0]).epsilon(1e-12));
    CHECK(mf.phi[i] == doctest::Approx(D[0] * a.s[0][i] + D[1] * a.s[1][i] + D[2] * a.s[2][i]).epsilon(1e-12));
  }
  double own = total_energy(pl.species[0].state, {}, pl.species[0].params) +
               total_energy(pl.species[1].state, {}, pl.species[1].params);
  CHECK(total_plasma_energy(pl) - own == doctest::Approx(interaction_energy_direct(pl)).epsilon(1e-12));
}

TEST_CASE("local kernel interaction energy agrees with direct quadrature") {
  Grid g = Grid::square(12, 2.0 * kPi);
  PlasmaState pl = pair(g, InteractionKernel::Kind::local, 0.2);
  double own = total_energy(pl.species[0].state, {}, pl.species[0].params) +
               total_energy(pl.species[1].state, {}, pl.species[1].params);
  CHECK(total_plasma_energy(pl) - own == doctest::Approx(interaction_energy_direct(pl)).epsilon(1e-11));
  pl.kernel.w = [](const Vec3& x) { return x[0] + 0.1; };
  CHECK_THROWS_AS(validate_plasma(pl), ConfigError);
}

TEST_CASE("coupled evolution conserves the total energy") {
  Grid g = Grid::square(16, 2.0 * kPi);
  for (auto kind : {InteractionKernel::Kind::separable, InteractionKernel::Kind::local}) {
    PlasmaState pl = pair(g, kind, 0.1);
    const double e0 = total_plasma_energy(pl);
    for (int k = 0; k < 40; ++k) pl = step_plasma(pl, 1e-3);
    CHECK(rel_drift(total_plasma_energy(pl), e0) < 1e-6);
    CHECK(pl.time == doctest::Approx(0.04));
  }
}

TEST_CASE("homogeneous spins precess about their conserved total moment") {
  Grid g = Grid::line(8, 2.0 * kPi);
  PlasmaState pl;
  pl.species.push_back(make("a", uniform_spinor(g, 0.7, 0.0)));
  pl.species.push_back(make("b", uniform_spinor(g, 2.0, 1.3)));
  pl.kernel.kind = InteractionKernel::Kind::separable;
  pl.kernel.J = 0.5;
  Vec3 m0 = total_spin_moment(pl);
  Vec3 s0 = pl.species[0].state.s.at(0);
  for (int k = 0; k < 500; ++k) pl = step_plasma(pl, 1e-2);
  Vec3 m1 = total_spin_moment(pl);
  for (int k = 0; k < 3; ++k) CHECK(std::abs(m1[k] - m0[k]) < 1e-10);
  Vec3 s1 = pl.species[0].state.s.at(0);
  CHECK(std::abs(s1[0] - s0[0]) + std::abs(s1[1] - s0[1]) > 1e-2);
  double c0 = s0[0] * m0[0] + s0[1] * m0[1] + s0[2] * m0[2];
  double c1 = s1[0] * m0[0] + s1[1] * m0[1] + s1[2] * m0[2];
  CHECK(c1 == doctest::Approx(c0).epsilon(1e-10));
}

TEST_CASE("uncoupled species evolve bitwise identically to standalone runs") {
  Grid g = Grid::square(16, 2.0 * kPi);
  PlasmaState pl = pair(g, InteractionKernel::Kind::none, 0.0);
  HydroState a = pl.species[0].state, b = pl.species[1].state;
  for (int k = 0; k < 5; ++k) {
    pl = step_plasma(pl, 1e-3);
    a = step_hydro(a, {}, pl.species[0].params, k * 1e-3, 1e-3);
    b = step_hydro(b, {}, pl.species[1].params, k * 1e-3, 1e-3);
  }
  CHECK(test::bitwise_equal(pl.species[0].state, a));
  CHECK(test::bitwise_equal(pl.species[1].state, b));
}

TEST_CASE("relabelling the species relabels the result") {
  Grid g = Grid::square(16, 2.0 * kPi);
  PlasmaState pl = pair(g, InteractionKernel::Kind::separable, 0.1);
  PlasmaState sw = pl;
  std::swap(sw.species[0], sw.species[1]);
  for (int k = 0; k < 5; ++k) {
    pl = step_plasma(pl, 1e-3);
    sw = step_plasma(sw, 1e-3);
  }
  CHECK(test::bitwise_equal(pl.species[0].state, sw.species[1].state));
  CHECK(test::bitwise_equal(pl.species[1].state, sw.species[0].state));
  CHECK(total_plasma_energy(pl) == doctest::Approx(total_plasma_energy(sw)).epsilon(1e-14));
}

TEST_CASE("product-space balance laws and budget") {
  Grid g = Grid::line(16, 2.0 * kPi);
  PlasmaState pl = pair(g, InteractionKernel::Kind::separable, 0.1);
  pl.kernel.g = [](const Vec3& x) { return std::exp(-x[0] * x[0] / 2.0); };
  ProductReport r = assemble_product_diagnostics(pl);
  CHECK(r.points == 256);
  CHECK(r.norm_defect < 1e-12);
  CHECK(r.continuity_residual < 1e-10);
  CHECK(r.momentum_residual < 1e-10);
  CHECK(r.spin_residual < 1e-10);
  CHECK_THROWS_AS(assemble_product_diagnostics(pl, {}, 100), BudgetError);
  Grid big = Grid::line(64, 2.0 * kPi);
  PlasmaState wide;
  wide.species.push_back(make("a", uniform_spinor(big, 0.3)));
  wide.species.push_back(make("b", uniform_spinor(big, 0.3)));
  CHECK_THROWS_AS(assemble_product_diagnostics(wide), BudgetError);
}
