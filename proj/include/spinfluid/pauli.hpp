#pragma once

#include "spinfluid/madelung.hpp"
#include "spinfluid/physics.hpp"

namespace sf {

/// exp(i a.sigma) as a row-major 2x2 matrix.
std::array<cplx, 4> pauli_exponential(const Vec3& a);

/// One Strang step local(dt/2), kinetic(dt), local(dt/2) starting at time t.
/// Negative dt steps backwards.
SpinorField step_pauli(const SpinorField& psi, const FieldConfig& fields, const PhysParams& p, double t, double dt);

/// Largest phase increment dt hbar k^2 / 2m of the kinetic step.
double kinetic_phase_bound(const Grid& g, const PhysParams& p, double dt);

struct PauliEnergy {
  double kinetic = 0.0;
  double potential = 0.0;  ///< q Phi + V
  double zeeman = 0.0;
  double total() const { return kinetic + potential + zeeman; }
};

PauliEnergy pauli_energy_terms(const SpinorField& psi, const FieldConfig& fields, const PhysParams& p, double t);
double pauli_energy(const SpinorField& psi, const FieldConfig& fields, const PhysParams& p, double t = 0.0);

/// Integral of psi^dagger sigma psi, i.e. of rho s.
Vec3 spin_expectation(const SpinorField& psi);

}  // namespace sf
