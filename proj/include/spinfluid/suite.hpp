#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spinfluid/madelung.hpp"

namespace sf {

/// One checked quantity of a verification suite.
struct SuiteRow {
  std::string group;
  std::string state;
  std::string check;
  double residual = 0.0;
  double l2_residual = 0.0;
  std::size_t masked = 0;
  double tolerance = 0.0;
  bool pass() const { return residual < tolerance; }
};

/// ||a - e^{i theta} b|| / ||a|| minimized over the constant phase theta.
double phase_aligned_error(const SpinorField& a, const SpinorField& b, double* theta = nullptr);

/// Pointwise and integral identities, the gradient-energy split, energy equality
/// and reconstruction on `count` seeded random states starting at `seed`.
std::vector<SuiteRow> identity_suite(const Grid& g, const PhysParams& p, std::uint64_t seed, int count);

/// Structural checks in the Phi/V/pressure, uniform A(t) and Zeeman regimes.
std::vector<SuiteRow> structural_suite(const Grid& g, const PhysParams& p, std::uint64_t seed, int count);

constexpr double kPointwiseTolerance = 1e-7;
constexpr double kIntegralTolerance = 1e-8;

}  // namespace sf
