#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "spinfluid/hydro.hpp"

namespace sf {

struct FunctionalDerivatives {
  ScalarField drho;
  VectorField3 du;
  VectorField3 ds;
};

struct EnergyTerms {
  double kinetic = 0.0;       ///< rho m u^2 / 2
  double electrostatic = 0.0;  ///< q Phi rho
  double external = 0.0;       ///< V rho
  double internal = 0.0;       ///< h(rho)
  double quantum = 0.0;        ///< (c_g^2 hbar^2 / 8m) |grad rho|^2 / rho
  double spin_gradient = 0.0;  ///< (c_g^2 hbar^2 / 8m) rho |grad s|^2
  double zeeman = 0.0;         ///< -(c_g kappa_s q hbar / 2m) rho B.s
  double total() const {
    return kinetic + electrostatic + external + internal + quantum + spin_gradient + zeeman;
  }
};

EnergyTerms energy_terms(const HydroState& st, const FieldConfig& fields, const PhysParams& p);

/// Fluid energy with |grad log rho|^2 rho written as 4 |grad sqrt(rho)|^2.
double total_energy(const HydroState& st, const FieldConfig& fields, const PhysParams& p, double t = 0.0);

FunctionalDerivatives functional_derivatives(const HydroState& st, const FieldConfig& fields, const PhysParams& p,
                                             double t = 0.0);

/// Poisson operator applied to the derivatives of the energy. For uniform A(t) the
/// explicit -q dA/dt / m of the time-dependent Hamiltonian is added to du.
HydroRates bracket_rhs(const HydroState& st, const FieldConfig& fields, const PhysParams& p, double t = 0.0);

struct LiePoissonState {
  ScalarField rho;
  VectorField3 M;      ///< rho (m u + q A)
  VectorField3 Sigma;  ///< (c_g hbar / 2) rho s
};

LiePoissonState to_lie_poisson(const HydroState& st, const Vec3& A, const PhysParams& p);
HydroState from_lie_poisson(const LiePoissonState& lp, const Vec3& A, const PhysParams& p);

/// Derivatives with respect to (rho, M, Sigma), stored in (drho, du, ds).
FunctionalDerivatives lie_poisson_derivatives(const HydroState& st, const FunctionalDerivatives& d, const Vec3& A,
                                              const PhysParams& p);

/// {F, G} by quadrature. `scale` receives the integral of the summed magnitudes of the
/// factors in each term.
double poisson_bracket(const HydroState& st, const FunctionalDerivatives& dF, const FunctionalDerivatives& dG,
                       const Vec3& A, const PhysParams& p, double* scale = nullptr);
/// Same bracket in momentum and spin density variables; dF and dG from lie_poisson_derivatives.
double lie_poisson_bracket(const LiePoissonState& lp, const FunctionalDerivatives& dF, const FunctionalDerivatives& dG,
                           double* scale = nullptr);

struct TestFunctional {
  std::string name;
  std::function<double(const HydroState&)> value;
  std::function<FunctionalDerivatives(const HydroState&)> derivatives;
};

/// Quadratic, cubic and linear functionals with closed-form derivatives, the mass, and the energy.
std::vector<TestFunctional> test_functionals(const Grid& g, std::uint64_t seed, const FieldConfig& fields,
                                             const PhysParams& p);

/// |{F,G} + {G,F}| relative to |{F,G}|, or to the bracket scale when {F,G} vanishes.
double bracket_antisymmetry_check(const HydroState& st, const TestFunctional& F, const TestFunctional& G,
                                  const Vec3& A, const PhysParams& p);

struct CheckRow {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass() const { return residual < tolerance; }
};

/// Largest relative pointwise difference of two right-hand sides, per field group.
double rates_difference(const HydroRates& a, const HydroRates& b);

/// Bracket against hydro RHS, antisymmetry, Casimir, change of variables and
/// finite-difference checks of the functional derivatives on one state.
std::vector<CheckRow> structural_checks(const HydroState& st, const FieldConfig& fields, const PhysParams& p,
                                        std::uint64_t seed, int fd_points = 6);

}  // namespace sf
