#pragma once

#include <string>

#include "spinfluid/fields.hpp"

namespace sf {

/// Barotropic internal energy density h(rho). Polytropic: h = K rho^gamma / (gamma - 1),
/// so that P = rho h' - h = K rho^gamma and dP/drho = rho h''.
struct PressureLaw {
  enum class Kind { none, polytropic };
  Kind kind = Kind::none;
  double gamma = 2.0;
  double K = 0.0;

  bool active() const { return kind == Kind::polytropic && K != 0.0; }
  double h(double rho) const;
  double dh(double rho) const;
  double d2h(double rho) const;
  double P(double rho) const;
};

struct PhysParams {
  double hbar = 1.0;
  double mass = 1.0;
  double charge = 1.0;
  double kappa_s = 1.0;
  double c_g = 1.0;
  double c_s = 0.5;
  PressureLaw pressure;
  ScalarField V;  ///< external potential energy; empty means zero
  /// Vacuum floor relative to the mean density.
  double rho_floor_rel = 1e-12;

  void validate() const;
};

enum class AMode { zero, uniform };

/// External electromagnetic data. A(t) = a0 + a_rate t in uniform mode.
struct FieldConfig {
  ScalarField phi;  ///< electrostatic potential; empty means zero
  AMode a_mode = AMode::zero;
  Vec3 a0{0.0, 0.0, 0.0};
  Vec3 a_rate{0.0, 0.0, 0.0};
  VectorField3 b;  ///< prescribed magnetic field; empty means zero
  bool lorentz_coupling = false;
  bool zeeman_test_mode = false;

  /// Throws ConfigError for combinations that have no consistent periodic realization.
  void validate(const Grid& g) const;

  bool has_phi() const { return !phi.empty(); }
  bool has_b() const;
  Vec3 A(double t) const;
  Vec3 dA_dt() const { return a_mode == AMode::uniform ? a_rate : Vec3{0.0, 0.0, 0.0}; }
  VectorField3 A_field(const Grid& g, double t) const { return VectorField3(g, A(t)); }
  /// E = -grad(phi) - dA/dt.
  VectorField3 E(const Grid& g) const;
  bool static_fields() const;
};

}  // namespace sf
