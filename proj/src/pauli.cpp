#include "spinfluid/pauli.hpp"

#include <cmath>

#include "spinfluid/errors.hpp"
#include "spinfluid/spectral.hpp"

namespace sf {

std::array<cplx, 4> pauli_exponential(const Vec3& a) {
  double th = std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]);
  double c, sinc;
  if (th < 1e-8) {
    c = 1.0 - th * th / 2.0;
    sinc = 1.0 - th * th / 6.0;
  } else {
    c = std::cos(th);
    sinc = std::sin(th) / th;
  }
  const cplx I(0.0, 1.0);
  // cos|a| + i sinc (a . sigma)
  return {c + I * sinc * a[2], I * sinc * cplx(a[0], -a[1]), I * sinc * cplx(a[0], a[1]), c - I * sinc * a[2]};
}

namespace {

void local_step(SpinorField& psi, const FieldConfig& f, const PhysParams& p, double tau) {
  const std::size_t n = psi.psi1.size();
  const bool phi = f.has_phi(), V = !p.V.empty(), B = !f.b.empty();
  const double zc = tau * p.charge / (2.0 * p.mass);
  for (std::size_t i = 0; i < n; ++i) {
    double pot = (phi ? p.charge * f.phi[i] : 0.0) + (V ? p.V[i] : 0.0);
    cplx ph = std::polar(1.0, -tau * pot / p.hbar);
    cplx a = psi.psi1[i], b = psi.psi2[i];
    if (B) {
      auto M = pauli_exponential({zc * f.b[0][i], zc * f.b[1][i], zc * f.b[2][i]});
      cplx a2 = M[0] * a + M[1] * b;
      b = M[2] * a + M[3] * b;
      a = a2;
    }
    psi.psi1[i] = ph * a;
    psi.psi2[i] = ph * b;
  }
}

std::vector<double> shifted_k2(const Grid& g, const Vec3& A, const PhysParams& p) {
  std::vector<double> k2(g.points(), 0.0);
  for (int ax = 0; ax < 3; ++ax) {
    double shift = p.charge * A[ax] / p.hbar;
    std::vector<double> k = full_wavenumbers(g, ax, false);
    for (std::size_t i = 0; i < k2.size(); ++i) {
      double kk = k[i] - shift;
      k2[i] += kk * kk;
    }
  }
  return k2;
}

}  // namespace

double kinetic_phase_bound(const Grid& g, const PhysParams& p, double dt) {
  double k2 = 0.0;
  for (int ax = 0; ax < g.dim(); ++ax) {
    double km = M_PI / g.dx(ax);
    k2 += km * km;
  }
  return std::abs(dt) * p.hbar * k2 / (2.0 * p.mass);
}

SpinorField step_pauli(const SpinorField& psi, const FieldConfig& f, const PhysParams& p, double t, double dt) {
  const Grid& g = psi.grid();
  if (dt == 0.0 || !std::isfinite(dt)) throw ConfigError("time step must be finite and nonzero");
  f.validate(g);
  SpinorField out = psi;
  local_step(out, f, p, dt / 2.0);
  std::vector<double> k2 = shifted_k2(g, f.A(t + dt / 2.0), p);
  const double c = -dt * p.hbar / (2.0 * p.mass);
  for (ComplexField* comp : {&out.psi1, &out.psi2}) {
    std::vector<cplx> spec = fft(*comp);
    for (std::size_t i = 0; i < spec.size(); ++i) spec[i] *= std::polar(1.0, c * k2[i]);
    *comp = ifft(g, std::move(spec));
  }
  local_step(out, f, p, dt / 2.0);
  require_finite(out.psi1, "psi1");
  require_finite(out.psi2, "psi2");
  return out;
}

PauliEnergy pauli_energy_terms(const SpinorField& psi, const FieldConfig& f, const PhysParams& p, double t) {
  const Grid& g = psi.grid();
  PauliEnergy e;
  std::vector<double> k2 = shifted_k2(g, f.A(t), p);
  const double norm = g.cell_volume() / static_cast<double>(g.points());
  for (const ComplexField* comp : {&psi.psi1, &psi.psi2}) {
    std::vector<cplx> spec = fft(*comp);
    double acc = 0.0;
    for (std::size_t i = 0; i < spec.size(); ++i) acc += std::norm(spec[i]) * k2[i];
    e.kinetic += p.hbar * p.hbar / (2.0 * p.mass) * acc * norm;
  }
  ScalarField rho = psi.density();
  if (f.has_phi() || !p.V.empty()) {
    ScalarField pot(g);
    for (std::size_t i = 0; i < g.points(); ++i)
      pot[i] = ((f.has_phi() ? p.charge * f.phi[i] : 0.0) + (p.V.empty() ? 0.0 : p.V[i])) * rho[i];
    e.potential = integrate(pot);
  }
  if (!f.b.empty()) {
    ScalarField z(g);
    for (std::size_t i = 0; i < g.points(); ++i) {
      cplx a = psi.psi1[i], b = psi.psi2[i];
      cplx ab = std::conj(a) * b;
      double sx = 2.0 * ab.real(), sy = 2.0 * ab.imag(), sz = std::norm(a) - std::norm(b);
      z[i] = f.b[0][i] * sx + f.b[1][i] * sy + f.b[2][i] * sz;
    }
    e.zeeman = -p.charge * p.hbar / (2.0 * p.mass) * integrate(z);
  }
  return e;
}

double pauli_energy(const SpinorField& psi, const FieldConfig& f, const PhysParams& p, double t) {
  return pauli_energy_terms(psi, f, p, t).total();
}

Vec3 spin_expectation(const SpinorField& psi) {
  const Grid& g = psi.grid();
  VectorField3 m(g);
  for (std::size_t i = 0; i < g.points(); ++i) {
    cplx a = psi.psi1[i], b = psi.psi2[i];
    cplx ab = std::conj(a) * b;
    m.set(i, {2.0 * ab.real(), 2.0 * ab.imag(), std::norm(a) - std::norm(b)});
  }
  return integrate(m);
}

}  // namespace sf
