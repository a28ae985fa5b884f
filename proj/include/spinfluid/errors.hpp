#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace sf {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class NonFiniteError : public Error {
 public:
  NonFiniteError(const std::string& what, std::size_t index)
      : Error(what + ": non-finite value at flat index " + std::to_string(index)), index_(index) {}
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

/// Density fell below the configured floor.
class VacuumError : public Error {
 public:
  VacuumError(const std::string& what, std::vector<std::size_t> points)
      : Error(what), points_(std::move(points)) {}
  const std::vector<std::size_t>& points() const { return points_; }

 private:
  std::vector<std::size_t> points_;
};

class InvariantError : public Error {
 public:
  using Error::Error;
};

/// Phase circulation is not an integer multiple of 2*pi*hbar along some axis.
class ReconstructionError : public Error {
 public:
  ReconstructionError(const std::string& what, std::array<double, 3> defect)
      : Error(what), defect_(defect) {}
  const std::array<double, 3>& circulation_defect() const { return defect_; }

 private:
  std::array<double, 3> defect_;
};

class BudgetError : public Error {
 public:
  using Error::Error;
};

}  // namespace sf
