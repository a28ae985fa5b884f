#pragma once

#include <string>
#include <vector>

#include "spinfluid/fields.hpp"
#include "spinfluid/physics.hpp"

namespace sf {

struct SpinorField {
  ComplexField psi1;
  ComplexField psi2;

  const Grid& grid() const { return psi1.grid(); }
  ScalarField density() const;
  double norm() const;
};

struct HydroState {
  ScalarField rho;
  VectorField3 u;
  VectorField3 s;

  const Grid& grid() const { return rho.grid(); }
  double mass() const;
  /// max | |s| - 1 |
  double spin_norm_defect() const;
};

/// reject: any point with rho <= rho_floor_rel * mean(rho) is an error.
/// permit: u and s are evaluated wherever rho > 0; exact zeros get the
/// density-weighted mean velocity and spin direction.
enum class VacuumPolicy { reject, permit };

/// Spectral gradient of a complex field along every axis.
std::array<ComplexField, 3> complex_gradient(const ComplexField& f);

HydroState forward_transform(const SpinorField& psi, const Vec3& A, const PhysParams& p,
                             VacuumPolicy policy = VacuumPolicy::reject);

/// Inverse transform with the phase of the reference component set to zero at `anchor`.
SpinorField reconstruct_spinor(const HydroState& state, const Vec3& A, const PhysParams& p,
                               const Index3& anchor = {0, 0, 0});

/// Per-axis winding numbers of the phase 1-form used by reconstruct_spinor.
Vec3 winding_numbers(const HydroState& state, const Vec3& A, const PhysParams& p);

ScalarField quantum_potential(const ScalarField& rho, const PhysParams& p);
/// Pi^{ij} = (hbar^2 rho / 4m) d_i s . d_j s
SymTensor3 spin_stress(const ScalarField& rho, const VectorField3& s, const PhysParams& p);
/// Same tensor from the angles eta = acos(s3), phi = atan2(s2, s1). Points with
/// sin(eta) < 1e-6 are zeroed and counted in `masked`.
SymTensor3 spin_stress_angles(const ScalarField& rho, const VectorField3& s, const PhysParams& p,
                              std::size_t* masked = nullptr);
/// v_s = (c_g hbar / 2m)(grad log rho x s + curl s)
VectorField3 spin_velocity(const ScalarField& rho, const VectorField3& s, const PhysParams& p);
ScalarField spin_helicity(const VectorField3& s);
/// grad(phi) = (s1 grad s2 - s2 grad s1)/(s1^2 + s2^2); zero where s1 = s2 = 0.
VectorField3 azimuth_gradient(const VectorField3& s);

struct IdentityRow {
  std::string name;
  double max_residual = 0.0;  ///< relative to the max-norm of the larger side
  double l2_residual = 0.0;   ///< relative L2
  std::size_t masked = 0;
  bool integral = false;
};

struct IdentityReport {
  std::vector<IdentityRow> rows;
  const IdentityRow* find(const std::string& name) const;
};

/// Pointwise identities evaluated on a spinor with magnetic field B and uniform A.
IdentityReport verify_identities(const SpinorField& psi, const VectorField3& B, const Vec3& A, const PhysParams& p);
/// Gradient-energy split of K_s plus the pointwise identity for |grad s|^2.
/// The split equality requires div(rho s) = 0, reported as row "div_rho_s".
IdentityReport verify_energy_split(const HydroState& state, const PhysParams& p);

struct Residual {
  double max_rel = 0.0;
  double l2_rel = 0.0;
};
/// Relative residual of two fields, masked points excluded (mask value 0).
Residual relative_residual(const std::vector<const ScalarField*>& lhs, const std::vector<const ScalarField*>& rhs,
                           const std::vector<unsigned char>* mask = nullptr);

}  // namespace sf
