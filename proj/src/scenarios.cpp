#include "spinfluid/scenarios.hpp"

#include <cmath>
#include <numbers>

#include "spinfluid/errors.hpp"
#include "spinfluid/random.hpp"
#include "spinfluid/spectral.hpp"

namespace sf {

namespace {

void normalize(SpinorField& psi) {
  double n = std::sqrt(psi.norm());
  psi.psi1 *= cplx(1.0 / n, 0.0);
  psi.psi2 *= cplx(1.0 / n, 0.0);
}

}  // namespace

ScalarField unit_random_field(const Grid& g, CounterRng& rng, int kmax) {
  ScalarField f = random_bandlimited(g, rng, kmax, 1.0);
  double m = f.max_abs();
  if (m > 0.0) f *= 1.0 / m;
  return f;
}

SpinorField gaussian_spinor(const Grid& g, double sigma0, const Vec3& k0, double eta, double phi,
                            const Vec3& center) {
  if (!(sigma0 > 0.0)) throw ConfigError("packet width must be positive");
  const double norm1 = std::pow(2.0 * std::numbers::pi * sigma0 * sigma0, -0.25);
  const double c = std::cos(eta / 2.0), s = std::sin(eta / 2.0);
  SpinorField psi{ComplexField(g), ComplexField(g)};
  for (std::size_t i = 0; i < g.points(); ++i) {
    Vec3 x = g.position(i);
    double amp = 1.0, ph = 0.0;
    for (int a = 0; a < g.dim(); ++a) {
      double y = x[a] - center[a];
      amp *= norm1 * std::exp(-y * y / (4.0 * sigma0 * sigma0));
      ph += k0[a] * y;
    }
    cplx z = std::polar(amp, ph);
    psi.psi1[i] = c * z;
    psi.psi2[i] = s * std::polar(1.0, phi) * z;
  }
  return psi;
}

SpinorField uniform_spinor(const Grid& g, double eta, double phi) {
  double a = 1.0 / std::sqrt(g.volume());
  return SpinorField{ComplexField(g, cplx(a * std::cos(eta / 2.0), 0.0)),
                     ComplexField(g, a * std::sin(eta / 2.0) * std::polar(1.0, phi))};
}

SpinorField plane_wave_spinor(const Grid& g, const Index3& modes, double eta, double phi) {
  const double a = 1.0 / std::sqrt(g.volume());
  const double c = std::cos(eta / 2.0), s = std::sin(eta / 2.0);
  SpinorField psi{ComplexField(g), ComplexField(g)};
  for (std::size_t i = 0; i < g.points(); ++i) {
    Vec3 x = g.position(i);
    double ph = 0.0;
    for (int ax = 0; ax < g.dim(); ++ax) ph += 2.0 * std::numbers::pi * modes[ax] * x[ax] / g.length(ax);
    psi.psi1[i] = std::polar(a * c, ph);
    psi.psi2[i] = std::polar(a * s, ph + phi);
  }
  return psi;
}

SpinorField helix_spinor(const Grid& g, int axis, int pitch, double eta) {
  if (axis < 0 || axis >= g.dim()) throw ConfigError("helix axis must be an active grid axis");
  const double a = 1.0 / std::sqrt(g.volume());
  SpinorField psi{ComplexField(g, cplx(a * std::cos(eta / 2.0), 0.0)), ComplexField(g)};
  for (std::size_t i = 0; i < g.points(); ++i) {
    double phi = 2.0 * std::numbers::pi * pitch * g.position(i)[axis] / g.length(axis);
    psi.psi2[i] = std::polar(a * std::sin(eta / 2.0), phi);
  }
  return psi;
}

SpinorField random_spinor(const Grid& g, std::uint64_t seed, int kmax, double contrast, double eta_swing,
                          double phase_amplitude) {
  CounterRng rng(seed, 0x737069ULL);
  ScalarField r = unit_random_field(g, rng, kmax);
  ScalarField e = unit_random_field(g, rng, kmax);
  ScalarField t1 = random_bandlimited(g, rng, kmax, phase_amplitude);
  ScalarField t2 = random_bandlimited(g, rng, kmax, phase_amplitude);
  SpinorField psi{ComplexField(g), ComplexField(g)};
  for (std::size_t i = 0; i < g.points(); ++i) {
    double a = std::sqrt(1.0 + contrast * r[i]);
    double eta = std::numbers::pi / 2.0 + eta_swing * e[i];
    psi.psi1[i] = std::polar(a * std::cos(eta / 2.0), t1[i]);
    psi.psi2[i] = std::polar(a * std::sin(eta / 2.0), t2[i]);
  }
  normalize(psi);
  return psi;
}

SpinorField texture_spinor(const Grid& g, std::uint64_t seed) {
  CounterRng rng(seed, 0x746578ULL);
  ScalarField e = unit_random_field(g, rng, 2);
  ScalarField t1 = random_bandlimited(g, rng, 2, 1.0);
  ScalarField t2 = random_bandlimited(g, rng, 2, 1.0);
  SpinorField psi{ComplexField(g), ComplexField(g)};
  const double two_pi = 2.0 * std::numbers::pi;
  for (std::size_t i = 0; i < g.points(); ++i) {
    Vec3 x = g.position(i);
    double cy = g.dim() > 1 ? std::cos(two_pi * x[1] / g.length(1)) : 1.0;
    double a = std::sqrt(1.0 + 0.2 * std::cos(two_pi * x[0] / g.length(0)) * cy);
    double eta = std::numbers::pi / 2.0 + 1.0 * e[i];
    psi.psi1[i] = std::polar(a * std::cos(eta / 2.0), t1[i]);
    psi.psi2[i] = std::polar(a * std::sin(eta / 2.0), t2[i]);
  }
  normalize(psi);
  return psi;
}

HydroState random_hydro_state(const Grid& g, std::uint64_t seed, int kmax, double velocity) {
  CounterRng rng(seed, 0x687964ULL);
  ScalarField r = unit_random_field(g, rng, kmax);
  HydroState st{ScalarField(g), VectorField3(g), VectorField3(g)};
  for (std::size_t i = 0; i < g.points(); ++i) st.rho[i] = 1.0 + 0.4 * r[i];
  st.rho *= 1.0 / integrate(st.rho);
  for (int k = 0; k < g.dim(); ++k) st.u[k] = velocity * unit_random_field(g, rng, kmax);
  ScalarField e = unit_random_field(g, rng, kmax);
  ScalarField ph = random_bandlimited(g, rng, kmax, 1.0);
  for (std::size_t i = 0; i < g.points(); ++i) {
    double eta = std::numbers::pi / 2.0 + 1.0 * e[i];
    st.s.set(i, {std::sin(eta) * std::cos(ph[i]), std::sin(eta) * std::sin(ph[i]), std::cos(eta)});
  }
  return st;
}

HydroState solenoidal_spin_state(const Grid& g, std::uint64_t seed, int kmax) {
  if (g.dim() != 2) throw ConfigError("solenoidal spin state needs a 2D grid");
  CounterRng rng(seed, 0x736f6cULL);
  ScalarField r = unit_random_field(g, rng, kmax);
  HydroState st{ScalarField(g), VectorField3(g), VectorField3(g)};
  for (std::size_t i = 0; i < g.points(); ++i) st.rho[i] = 1.0 + 0.4 * r[i];
  ScalarField psi = random_bandlimited(g, rng, kmax, 1.0);
  VectorField3 gp = gradient(psi);
  double gmax = 0.0;
  for (std::size_t i = 0; i < g.points(); ++i)
    gmax = std::max(gmax, std::hypot(gp[0][i], gp[1][i]) / st.rho[i]);
  double scale = gmax > 0.0 ? 0.8 / gmax : 0.0;
  for (std::size_t i = 0; i < g.points(); ++i) {
    double sx = scale * gp[1][i] / st.rho[i], sy = -scale * gp[0][i] / st.rho[i];
    st.s.set(i, {sx, sy, std::sqrt(1.0 - sx * sx - sy * sy)});
  }
  for (int k = 0; k < 2; ++k) st.u[k] = 0.5 * unit_random_field(g, rng, kmax);
  double m = integrate(st.rho);
  st.rho *= 1.0 / m;
  return st;
}

}  // namespace sf
