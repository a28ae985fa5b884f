#include "spinfluid/physics.hpp"

#include <cmath>

#include "spinfluid/errors.hpp"
#include "spinfluid/spectral.hpp"

namespace sf {

double PressureLaw::h(double rho) const {
  return active() ? K * std::pow(rho, gamma) / (gamma - 1.0) : 0.0;
}
double PressureLaw::dh(double rho) const {
  return active() ? K * gamma * std::pow(rho, gamma - 1.0) / (gamma - 1.0) : 0.0;
}
double PressureLaw::d2h(double rho) const { return active() ? K * gamma * std::pow(rho, gamma - 2.0) : 0.0; }
double PressureLaw::P(double rho) const { return active() ? K * std::pow(rho, gamma) : 0.0; }

void PhysParams::validate() const {
  if (!(hbar > 0.0)) throw ConfigError("physics.hbar must be positive");
  if (!(mass > 0.0)) throw ConfigError("physics.mass must be positive");
  if (!std::isfinite(charge)) throw ConfigError("physics.charge must be finite");
  if (!(c_g != 0.0) || !std::isfinite(c_g)) throw ConfigError("physics.c_g must be nonzero");
  if (!std::isfinite(kappa_s)) throw ConfigError("physics.kappa_s must be finite");
  if (pressure.kind == PressureLaw::Kind::polytropic && (pressure.gamma == 1.0 || !std::isfinite(pressure.gamma)))
    throw ConfigError("physics.gamma must differ from 1 for a polytropic law");
  if (!(rho_floor_rel >= 0.0)) throw ConfigError("physics.rho_floor must be non-negative");
}

bool FieldConfig::has_b() const { return !b.empty() && b.max_abs() > 0.0; }

Vec3 FieldConfig::A(double t) const {
  if (a_mode == AMode::zero) return {0.0, 0.0, 0.0};
  return {a0[0] + a_rate[0] * t, a0[1] + a_rate[1] * t, a0[2] + a_rate[2] * t};
}

VectorField3 FieldConfig::E(const Grid& g) const {
  VectorField3 e = has_phi() ? gradient(phi) : VectorField3(g);
  e *= -1.0;
  Vec3 r = dA_dt();
  for (int k = 0; k < 3; ++k) e[k] += -r[k];
  return e;
}

bool FieldConfig::static_fields() const {
  return a_mode == AMode::zero || (a_rate[0] == 0.0 && a_rate[1] == 0.0 && a_rate[2] == 0.0);
}

void FieldConfig::validate(const Grid& g) const {
  if (has_phi()) require_same_grid(phi.grid(), g, "fields.phi");
  if (!b.empty()) require_same_grid(b.grid(), g, "fields.b");
  if (zeeman_test_mode) {
    if (a_mode != AMode::zero) throw ConfigError("zeeman_test_mode requires fields.a_mode = zero");
    if (lorentz_coupling) throw ConfigError("zeeman_test_mode requires flags.lorentz_coupling = false");
  } else if (has_b()) {
    throw ConfigError(
        "a prescribed magnetic field has no periodic vector potential; set flags.zeeman_test_mode = true");
  }
}

}  // namespace sf
