#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "spinfluid/grid.hpp"

namespace sf {

using cplx = std::complex<double>;

class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(const Grid& g, double value = 0.0) : grid_(g), v_(g.points(), value) {}
  ScalarField(const Grid& g, std::vector<double> values);

  /// Samples f at every grid position.
  static ScalarField sample(const Grid& g, const std::function<double(const Vec3&)>& f);

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return v_.size(); }
  bool empty() const { return v_.empty(); }

  double& operator[](std::size_t i) { return v_[i]; }
  double operator[](std::size_t i) const { return v_[i]; }
  double* data() { return v_.data(); }
  const double* data() const { return v_.data(); }
  std::vector<double>& values() { return v_; }
  const std::vector<double>& values() const { return v_; }

  ScalarField& operator+=(const ScalarField& o);
  ScalarField& operator-=(const ScalarField& o);
  ScalarField& operator*=(const ScalarField& o);
  ScalarField& operator*=(double a);
  ScalarField& operator+=(double a);

  double max() const;
  double min() const;
  double max_abs() const;
  double mean() const;

 private:
  Grid grid_;
  std::vector<double> v_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(ScalarField a, const ScalarField& b);
ScalarField operator*(double s, ScalarField a);
ScalarField operator*(ScalarField a, double s);

/// Three real components per point, also on 1D and 2D grids.
class VectorField3 {
 public:
  VectorField3() = default;
  explicit VectorField3(const Grid& g, const Vec3& value = {0.0, 0.0, 0.0});

  static VectorField3 sample(const Grid& g, const std::function<Vec3(const Vec3&)>& f);

  const Grid& grid() const { return c_[0].grid(); }
  std::size_t size() const { return c_[0].size(); }
  bool empty() const { return c_[0].empty(); }

  ScalarField& operator[](int k) { return c_[k]; }
  const ScalarField& operator[](int k) const { return c_[k]; }
  Vec3 at(std::size_t i) const { return {c_[0][i], c_[1][i], c_[2][i]}; }
  void set(std::size_t i, const Vec3& v) {
    c_[0][i] = v[0];
    c_[1][i] = v[1];
    c_[2][i] = v[2];
  }

  VectorField3& operator+=(const VectorField3& o);
  VectorField3& operator-=(const VectorField3& o);
  VectorField3& operator*=(double a);
  /// Multiplies every component by a scalar field.
  VectorField3& operator*=(const ScalarField& f);

  double max_abs() const;

 private:
  std::array<ScalarField, 3> c_;
};

VectorField3 operator+(VectorField3 a, const VectorField3& b);
VectorField3 operator-(VectorField3 a, const VectorField3& b);
VectorField3 operator*(double s, VectorField3 a);
VectorField3 operator*(const ScalarField& f, VectorField3 a);

ScalarField dot(const VectorField3& a, const VectorField3& b);
VectorField3 cross(const VectorField3& a, const VectorField3& b);
ScalarField norm(const VectorField3& a);

class ComplexField {
 public:
  ComplexField() = default;
  explicit ComplexField(const Grid& g, cplx value = {0.0, 0.0}) : grid_(g), v_(g.points(), value) {}
  ComplexField(const Grid& g, std::vector<cplx> values);

  static ComplexField sample(const Grid& g, const std::function<cplx(const Vec3&)>& f);

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return v_.size(); }
  bool empty() const { return v_.empty(); }
  cplx& operator[](std::size_t i) { return v_[i]; }
  const cplx& operator[](std::size_t i) const { return v_[i]; }
  cplx* data() { return v_.data(); }
  const cplx* data() const { return v_.data(); }
  std::vector<cplx>& values() { return v_; }
  const std::vector<cplx>& values() const { return v_; }

  ScalarField real() const;
  ScalarField imag() const;
  ScalarField abs2() const;
  ComplexField& operator*=(cplx a);

 private:
  Grid grid_;
  std::vector<cplx> v_;
};

/// Symmetric 3x3 tensor per point, stored as xx, yy, zz, xy, xz, yz.
class SymTensor3 {
 public:
  SymTensor3() = default;
  explicit SymTensor3(const Grid& g);

  static int slot(int i, int j);
  ScalarField& operator()(int i, int j) { return c_[slot(i, j)]; }
  const ScalarField& operator()(int i, int j) const { return c_[slot(i, j)]; }
  ScalarField& component(int k) { return c_[k]; }
  const ScalarField& component(int k) const { return c_[k]; }
  const Grid& grid() const { return c_[0].grid(); }

 private:
  std::array<ScalarField, 6> c_;
};

/// Throws NonFiniteError naming `what` if any value is NaN or infinite.
void require_finite(const ScalarField& f, const std::string& what);
void require_finite(const VectorField3& f, const std::string& what);
void require_finite(const ComplexField& f, const std::string& what);

void require_same_grid(const Grid& a, const Grid& b, const std::string& what);

}  // namespace sf
