#pragma once

#include <algorithm>
#include <cmath>
#include <cstring>

#include "spinfluid/fields.hpp"
#include "spinfluid/madelung.hpp"

namespace test {

inline double max_diff(const sf::ScalarField& a, const sf::ScalarField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double max_diff(const sf::VectorField3& a, const sf::VectorField3& b) {
  return std::max({max_diff(a[0], b[0]), max_diff(a[1], b[1]), max_diff(a[2], b[2])});
}

inline double max_diff(const sf::ComplexField& a, const sf::ComplexField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double max_diff(const sf::SpinorField& a, const sf::SpinorField& b) {
  return std::max(max_diff(a.psi1, b.psi1), max_diff(a.psi2, b.psi2));
}

inline bool bitwise_equal(const sf::ScalarField& a, const sf::ScalarField& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

inline bool bitwise_equal(const sf::VectorField3& a, const sf::VectorField3& b) {
  return bitwise_equal(a[0], b[0]) && bitwise_equal(a[1], b[1]) && bitwise_equal(a[2], b[2]);
}

inline bool bitwise_equal(const sf::HydroState& a, const sf::HydroState& b) {
  return bitwise_equal(a.rho, b.rho) && bitwise_equal(a.u, b.u) && bitwise_equal(a.s, b.s);
}

constexpr double kPi = 3.14159265358979323846;

}  // namespace test
