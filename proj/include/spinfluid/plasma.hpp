#pragma once

#include <functional>
#include <string>
#include <vector>

#include "spinfluid/hydro.hpp"

namespace sf {

struct Species {
  std::string name;
  HydroState state;
  PhysParams params;
  FieldConfig fields;
};

/// Binary interaction V_ij with V_ii = 0.
///   constant:  V = c
///   separable: V = -J (s_i . s_j) g(x_i) g(x_j)
///   local:     V = -J (s_i . s_j) w(x_i - x_j), species on one grid, w even
struct InteractionKernel {
  enum class Kind { none, constant, separable, local };
  Kind kind = Kind::none;
  double J = 0.0;
  double c = 0.0;
  std::function<double(const Vec3&)> g;  ///< empty means g = 1
  std::function<double(const Vec3&)> w;  ///< evaluated at minimal-image separations

  bool couples() const { return kind != Kind::none; }
};

struct PlasmaState {
  std::vector<Species> species;
  InteractionKernel kernel;
  double time = 0.0;
};

struct MeanField {
  ScalarField phi;      ///< Phi_i on the grid of species i
  VectorField3 dphi_ds;  ///< partial derivative with respect to s_i
  VectorField3 grad_phi;  ///< gradient at fixed s_i
};

/// Throws ConfigError for kernels that are not symmetric or grids that cannot be paired.
void validate_plasma(const PlasmaState& plasma);

MeanField mean_field_potential(const PlasmaState& plasma, std::size_t i);

/// Simultaneous RK4 step of all species; the mean fields are rebuilt at every stage.
PlasmaState step_plasma(const PlasmaState& plasma, double dt, const HydroOptions& opts = {},
                        std::vector<StepInfo>* info = nullptr);

/// Sum of species energies plus half the integrated mean-field energy.
double total_plasma_energy(const PlasmaState& plasma);
/// Interaction energy by direct double quadrature over point pairs.
double interaction_energy_direct(const PlasmaState& plasma);
/// Sum over species of the integral of rho s.
Vec3 total_spin_moment(const PlasmaState& plasma);

struct ProductReport {
  std::size_t points = 0;
  double norm_defect = 0.0;          ///< | integral of varrho - product of masses |
  double continuity_residual = 0.0;  ///< relative to max |d varrho / dt|
  double momentum_residual = 0.0;    ///< (d_t + U.grad)U - F/m, relative to max |F/m|
  double spin_residual = 0.0;        ///< (d_t + U.grad)s - tau, relative to max |tau|
};

/// Assembles the two-species product fields and evaluates the product-space balance laws.
/// Throws BudgetError when either grid has more than 32 points per axis or more than
/// `max_points` product points.
ProductReport assemble_product_diagnostics(const PlasmaState& plasma, const HydroOptions& opts = {},
                                           std::size_t max_points = std::size_t(1) << 20);

}  // namespace sf
