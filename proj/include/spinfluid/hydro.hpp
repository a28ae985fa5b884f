#pragma once

#include <string>
#include <vector>

#include "spinfluid/madelung.hpp"
#include "spinfluid/physics.hpp"

namespace sf {

struct HydroOptions {
  bool dealias = true;
  bool renormalize_spin = true;
  /// Forces and torques are faded out between these density levels relative to max(rho).
  double mask_lo = 1e-16;
  double mask_hi = 1e-9;
  /// Pre-projection | |s| - 1 | above this is a breakdown.
  double spin_drift_limit = 1e-4;
  /// Breakdown once the number of points below the density floor has grown by this grid fraction.
  double floor_growth_limit = 1e-3;
};

struct HydroRates {
  ScalarField drho;
  VectorField3 du;
  VectorField3 ds;
};

/// Right-hand side of the fluid-with-spin system at time t.
HydroRates hydro_rhs(const HydroState& state, const FieldConfig& fields, const PhysParams& p, double t = 0.0,
                     bool dealias = false, const HydroOptions& opts = {});

/// The integrator evolves a = sqrt(rho) in place of rho.
struct AmplitudeState {
  ScalarField a;
  VectorField3 u;
  VectorField3 s;
};

struct AmplitudeRates {
  ScalarField da;
  VectorField3 du;
  VectorField3 ds;
};

/// Additional accelerations and spin rates, added before masking and dealiasing.
struct ExtraRates {
  VectorField3 du;
  VectorField3 ds;
};

AmplitudeState to_amplitude(const HydroState& st);
HydroState from_amplitude(const AmplitudeState& st);

/// Smooth 0..1 weight of log(rho / max rho) between opts.mask_lo and opts.mask_hi.
ScalarField vacuum_weight(const ScalarField& rho, const HydroOptions& opts);

/// Replaces u and s where the vacuum weight is zero by their density-weighted means
/// over the rest of the grid. Returns the number of points changed.
std::size_t fill_vacuum(HydroState& st, const HydroOptions& opts);

AmplitudeRates amplitude_rhs(const AmplitudeState& st, const FieldConfig& fields, const PhysParams& p, double t,
                             const HydroOptions& opts, const ExtraRates* extra = nullptr);

/// x + h k
AmplitudeState axpy(const AmplitudeState& x, double h, const AmplitudeRates& k);

struct StepInfo {
  double spin_drift = 0.0;         ///< max | |s| - 1 | before projection
  double projection_change = 0.0;  ///< max pointwise change made by the projection
};

/// st += dt (k1 + 2 k2 + 2 k3 + k4) / 6
void rk4_combine(AmplitudeState& st, double dt, const AmplitudeRates& k1, const AmplitudeRates& k2,
                 const AmplitudeRates& k3, const AmplitudeRates& k4);

/// Finiteness, spin drift check and optional projection of s onto the unit sphere.
void finish_step(AmplitudeState& st, const HydroOptions& opts, StepInfo* info);

void step_amplitude(AmplitudeState& st, const FieldConfig& fields, const PhysParams& p, double t, double dt,
                    const HydroOptions& opts, StepInfo* info = nullptr);

/// Classical RK4 step from t to t + dt.
HydroState step_hydro(const HydroState& state, const FieldConfig& fields, const PhysParams& p, double t, double dt,
                      const HydroOptions& opts = {}, StepInfo* info = nullptr);

/// Tracks the number of points below rho_floor_rel * mean(rho0).
class BreakdownMonitor {
 public:
  BreakdownMonitor(const ScalarField& rho0, const PhysParams& p, const HydroOptions& opts);
  /// Throws VacuumError when the sub-floor count has grown past the limit.
  void check(const ScalarField& rho) const;
  std::size_t baseline() const { return baseline_; }
  double floor() const { return floor_; }

 private:
  double floor_;
  std::size_t baseline_;
  std::size_t allowed_;
};

struct ErrorRow {
  double time = 0.0;
  double rho = 0.0;  ///< relative L2
  double u = 0.0;    ///< density-weighted relative L2
  double s = 0.0;    ///< density-weighted relative L2
};

struct ErrorReport {
  std::vector<ErrorRow> rows;
  bool complete = true;
  double breakdown_time = 0.0;
  std::string failure;

  double max_rho() const;
  double max_u() const;
  double max_s() const;
};

ErrorRow state_error(const HydroState& reference, const HydroState& test);

/// Evolves psi0 with the Pauli solver and its Madelung transform with the hydro solver,
/// comparing them at `samples` evenly spaced times (plus t = 0).
ErrorReport correspondence_error(const SpinorField& psi0, const FieldConfig& fields, const PhysParams& p,
                                 double t_final, double dt, const HydroOptions& opts = {}, int samples = 10);

}  // namespace sf
