#pragma once

#include <memory>
#include <vector>

#include "spinfluid/fields.hpp"

namespace sf {

namespace detail {
struct Layout;
}

/// Half-complex spectrum of a real field over the active axes.
/// Odd derivatives drop the Nyquist mode of the differentiated axis.
class Spectrum {
 public:
  explicit Spectrum(const ScalarField& f);

  const Grid& grid() const { return grid_; }
  std::vector<cplx>& coeffs() { return c_; }
  const std::vector<cplx>& coeffs() const { return c_; }

  ScalarField to_field() const;
  ScalarField derivative(int axis) const;
  ScalarField second_derivative(int a, int b) const;
  ScalarField laplacian() const;
  /// Zeroes modes with |n| > N/3 along any active axis.
  Spectrum& dealias();
  /// Sum of |f|^2 dV evaluated in spectral space.
  double energy() const;

 private:
  Spectrum(const Grid& g, std::shared_ptr<const detail::Layout> layout, std::vector<cplx> c);
  ScalarField inverse(std::vector<cplx> c) const;

  Grid grid_;
  std::shared_ptr<const detail::Layout> layout_;
  std::vector<cplx> c_;
};

ScalarField derivative(const ScalarField& f, int axis);
VectorField3 gradient(const ScalarField& f);
ScalarField divergence(const VectorField3& v);
ScalarField laplacian(const ScalarField& f);
VectorField3 laplacian(const VectorField3& v);
VectorField3 curl(const VectorField3& v);
/// (a . grad) v for each component of v.
VectorField3 advective_derivative(const VectorField3& a, const VectorField3& v);

/// Zero-mean potential whose gradient is the curl-free, zero-mean part of g.
ScalarField inverse_gradient(const VectorField3& g);

ScalarField dealias(const ScalarField& f);
VectorField3 dealias(const VectorField3& v);

/// Cell-volume weighted sum.
double integrate(const ScalarField& f);
Vec3 integrate(const VectorField3& v);
/// Parseval form of integrate(f*f).
double spectral_energy(const ScalarField& f);

/// Unnormalized forward and normalized inverse transforms of complex fields.
std::vector<cplx> fft(const ComplexField& f);
ComplexField ifft(const Grid& g, std::vector<cplx> spectrum);
/// Wavenumber of every point of the full complex layout along one axis.
/// With odd = true the Nyquist entry is zero.
std::vector<double> full_wavenumbers(const Grid& g, int axis, bool odd);

}  // namespace sf
