#include "spinfluid/fields.hpp"

#include <algorithm>
#include <cmath>

#include "spinfluid/errors.hpp"

namespace sf {

ScalarField::ScalarField(const Grid& g, std::vector<double> values) : grid_(g), v_(std::move(values)) {
  if (v_.size() != g.points()) throw Error("scalar field size does not match grid");
}

ScalarField ScalarField::sample(const Grid& g, const std::function<double(const Vec3&)>& f) {
  ScalarField out(g);
  for (std::size_t i = 0; i < g.points(); ++i) out[i] = f(g.position(i));
  return out;
}

ScalarField& ScalarField::operator+=(const ScalarField& o) {
  for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += o.v_[i];
  return *this;
}
ScalarField& ScalarField::operator-=(const ScalarField& o) {
  for (std::size_t i = 0; i < v_.size(); ++i) v_[i] -= o.v_[i];
  return *this;
}
ScalarField& ScalarField::operator*=(const ScalarField& o) {
  for (std::size_t i = 0; i < v_.size(); ++i) v_[i] *= o.v_[i];
  return *this;
}
ScalarField& ScalarField::operator*=(double a) {
  for (double& x : v_) x *= a;
  return *this;
}
ScalarField& ScalarField::operator+=(double a) {
  for (double& x : v_) x += a;
  return *this;
}

double ScalarField::max() const { return *std::max_element(v_.begin(), v_.end()); }
double ScalarField::min() const { return *std::min_element(v_.begin(), v_.end()); }
double ScalarField::max_abs() const {
  double m = 0.0;
  for (double x : v_) m = std::max(m, std::abs(x));
  return m;
}
double ScalarField::mean() const {
  double s = 0.0;
  for (double x : v_) s += x;
  return v_.empty() ? 0.0 : s / static_cast<double>(v_.size());
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(ScalarField a, const ScalarField& b) { return a *= b; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }
ScalarField operator*(ScalarField a, double s) { return a *= s; }

VectorField3::VectorField3(const Grid& g, const Vec3& value) {
  for (int k = 0; k < 3; ++k) c_[k] = ScalarField(g, value[k]);
}

VectorField3 VectorField3::sample(const Grid& g, const std::function<Vec3(const Vec3&)>& f) {
  VectorField3 out(g);
  for (std::size_t i = 0; i < g.points(); ++i) out.set(i, f(g.position(i)));
  return out;
}

VectorField3& VectorField3::operator+=(const VectorField3& o) {
  for (int k = 0; k < 3; ++k) c_[k] += o.c_[k];
  return *this;
}
VectorField3& VectorField3::operator-=(const VectorField3& o) {
  for (int k = 0; k < 3; ++k) c_[k] -= o.c_[k];
  return *this;
}
VectorField3& VectorField3::operator*=(double a) {
  for (int k = 0; k < 3; ++k) c_[k] *= a;
  return *this;
}
VectorField3& VectorField3::operator*=(const ScalarField& f) {
  for (int k = 0; k < 3; ++k) c_[k] *= f;
  return *this;
}
double VectorField3::max_abs() const {
  return std::max({c_[0].max_abs(), c_[1].max_abs(), c_[2].max_abs()});
}

VectorField3 operator+(VectorField3 a, const VectorField3& b) { return a += b; }
VectorField3 operator-(VectorField3 a, const VectorField3& b) { return a -= b; }
VectorField3 operator*(double s, VectorField3 a) { return a *= s; }
VectorField3 operator*(const ScalarField& f, VectorField3 a) { return a *= f; }

ScalarField dot(const VectorField3& a, const VectorField3& b) {
  ScalarField out(a.grid());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = a[0][i] * b[0][i] + a[1][i] * b[1][i] + a[2][i] * b[2][i];
  return out;
}

VectorField3 cross(const VectorField3& a, const VectorField3& b) {
  VectorField3 out(a.grid());
  for (std::size_t i = 0; i < a.size(); ++i) {
    out[0][i] = a[1][i] * b[2][i] - a[2][i] * b[1][i];
    out[1][i] = a[2][i] * b[0][i] - a[0][i] * b[2][i];
    out[2][i] = a[0][i] * b[1][i] - a[1][i] * b[0][i];
  }
  return out;
}

ScalarField norm(const VectorField3& a) {
  ScalarField out = dot(a, a);
  for (double& x : out.values()) x = std::sqrt(x);
  return out;
}

ComplexField::ComplexField(const Grid& g, std::vector<cplx> values) : grid_(g), v_(std::move(values)) {
  if (v_.size() != g.points()) throw Error("complex field size does not match grid");
}

ComplexField ComplexField::sample(const Grid& g, const std::function<cplx(const Vec3&)>& f) {
  ComplexField out(g);
  for (std::size_t i = 0; i < g.points(); ++i) out[i] = f(g.position(i));
  return out;
}

ScalarField ComplexField::real() const {
  ScalarField out(grid_);
  for (std::size_t i = 0; i < v_.size(); ++i) out[i] = v_[i].real();
  return out;
}
ScalarField ComplexField::imag() const {
  ScalarField out(grid_);
  for (std::size_t i = 0; i < v_.size(); ++i) out[i] = v_[i].imag();
  return out;
}
ScalarField ComplexField::abs2() const {
  ScalarField out(grid_);
  for (std::size_t i = 0; i < v_.size(); ++i) out[i] = std::norm(v_[i]);
  return out;
}
ComplexField& ComplexField::operator*=(cplx a) {
  for (cplx& z : v_) z *= a;
  return *this;
}

SymTensor3::SymTensor3(const Grid& g) {
  for (auto& c : c_) c = ScalarField(g);
}

int SymTensor3::slot(int i, int j) {
  if (i == j) return i;
  int lo = std::min(i, j), hi = std::max(i, j);
  if (lo == 0) return hi == 1 ? 3 : 4;
  return 5;
}

void require_finite(const ScalarField& f, const std::string& what) {
  for (std::size_t i = 0; i < f.size(); ++i)
    if (!std::isfinite(f[i])) throw NonFiniteError(what, i);
}
void require_finite(const VectorField3& f, const std::string& what) {
  for (int k = 0; k < 3; ++k) require_finite(f[k], what + "[" + std::to_string(k) + "]");
}
void require_finite(const ComplexField& f, const std::string& what) {
  for (std::size_t i = 0; i < f.size(); ++i)
    if (!std::isfinite(f[i].real()) || !std::isfinite(f[i].imag())) throw NonFiniteError(what, i);
}

void require_same_grid(const Grid& a, const Grid& b, const std::string& what) {
  if (a != b) throw ConfigError(what + ": fields live on different grids");
}

}  // namespace sf
