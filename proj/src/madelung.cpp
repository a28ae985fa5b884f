#include "spinfluid/madelung.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "spinfluid/errors.hpp"
#include "spinfluid/spectral.hpp"

namespace sf {

ScalarField SpinorField::density() const { return psi1.abs2() + psi2.abs2(); }

double SpinorField::norm() const { return integrate(density()); }

double HydroState::mass() const { return integrate(rho); }

double HydroState::spin_norm_defect() const {
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    Vec3 v = s.at(i);
    d = std::max(d, std::abs(std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]) - 1.0));
  }
  return d;
}

const IdentityRow* IdentityReport::find(const std::string& name) const {
  for (const auto& r : rows)
    if (r.name == name) return &r;
  return nullptr;
}

std::array<ComplexField, 3> complex_gradient(const ComplexField& f) {
  const Grid& g = f.grid();
  std::vector<cplx> spec = fft(f);
  std::array<ComplexField, 3> out;
  for (int a = 0; a < 3; ++a) {
    if (a >= g.dim()) {
      out[a] = ComplexField(g);
      continue;
    }
    std::vector<double> k = full_wavenumbers(g, a, true);
    std::vector<cplx> c(spec.size());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = cplx(0.0, k[i]) * spec[i];
    out[a] = ifft(g, std::move(c));
  }
  return out;
}

HydroState forward_transform(const SpinorField& psi, const Vec3& A, const PhysParams& p, VacuumPolicy policy) {
  const Grid& g = psi.grid();
  require_same_grid(g, psi.psi2.grid(), "forward_transform");
  require_finite(psi.psi1, "psi1");
  require_finite(psi.psi2, "psi2");
  HydroState st;
  st.rho = psi.density();
  double floor = p.rho_floor_rel * st.rho.mean();
  if (policy == VacuumPolicy::reject) {
    std::vector<std::size_t> bad;
    for (std::size_t i = 0; i < g.points(); ++i)
      if (!(st.rho[i] > floor)) bad.push_back(i);
    if (!bad.empty())
      throw VacuumError(fmt::format("density at or below floor {:.3e} at {} points (first flat index {})", floor,
                                    bad.size(), bad.front()),
                        bad);
  }
  auto d1 = complex_gradient(psi.psi1);
  auto d2 = complex_gradient(psi.psi2);
  st.u = VectorField3(g);
  st.s = VectorField3(g);
  const double c = p.hbar / p.mass;
  std::vector<std::size_t> empty_points;
  Vec3 usum{0, 0, 0}, ssum{0, 0, 0};
  for (std::size_t i = 0; i < g.points(); ++i) {
    double r = st.rho[i];
    if (!(r > 0.0)) {
      empty_points.push_back(i);
      continue;
    }
    cplx a = psi.psi1[i], b = psi.psi2[i];
    for (int k = 0; k < 3; ++k) {
      double cur = (std::conj(a) * d1[k][i] + std::conj(b) * d2[k][i]).imag();
      st.u[k][i] = c * cur / r - p.charge * A[k] / p.mass;
      usum[k] += r * st.u[k][i];
    }
    cplx ab = std::conj(a) * b;
    Vec3 sv{2.0 * ab.real() / r, 2.0 * ab.imag() / r, (std::norm(a) - std::norm(b)) / r};
    st.s.set(i, sv);
    for (int k = 0; k < 3; ++k) ssum[k] += r * sv[k];
  }
  if (!empty_points.empty()) {
    double m = 0.0;
    for (double r : st.rho.values()) m += r;
    double sn = std::sqrt(ssum[0] * ssum[0] + ssum[1] * ssum[1] + ssum[2] * ssum[2]);
    Vec3 sfill = sn > 0.0 ? Vec3{ssum[0] / sn, ssum[1] / sn, ssum[2] / sn} : Vec3{0.0, 0.0, 1.0};
    Vec3 ufill{0, 0, 0};
    if (m > 0.0)
      for (int k = 0; k < 3; ++k) ufill[k] = usum[k] / m;
    for (std::size_t i : empty_points) {
      st.u.set(i, ufill);
      st.s.set(i, sfill);
    }
  }
  require_finite(st.u, "velocity");
  require_finite(st.s, "spin");
  return st;
}

VectorField3 azimuth_gradient(const VectorField3& s) {
  const Grid& g = s.grid();
  VectorField3 g1 = gradient(s[0]);
  VectorField3 g2 = gradient(s[1]);
  VectorField3 out(g);
  for (std::size_t i = 0; i < g.points(); ++i) {
    double perp = s[0][i] * s[0][i] + s[1][i] * s[1][i];
    if (perp <= 0.0) continue;
    for (int k = 0; k < 3; ++k) out[k][i] = (s[0][i] * g2[k][i] - s[1][i] * g1[k][i]) / perp;
  }
  return out;
}

namespace {

void check_unit_spin(const VectorField3& s, double tol) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    Vec3 v = s.at(i);
    double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    if (!(std::abs(n - 1.0) <= tol))
      throw InvariantError("|s| deviates from 1 by " + std::to_string(std::abs(n - 1.0)) + " at flat index " +
                           std::to_string(i));
  }
}

// Phase 1-form of the reference component and the spinor built from it.
struct PhaseForm {
  VectorField3 G;
  int reference = 1;  // 1 or 2; 0 means the state is a pure pole state
  double pole_sign = 1.0;
};

PhaseForm phase_form(const HydroState& st, const Vec3& A, const PhysParams& p) {
  const Grid& g = st.grid();
  const auto& s = st.s;
  PhaseForm pf;
  double max_perp = 0.0, min_up = 2.0, min_down = 2.0;
  for (std::size_t i = 0; i < g.points(); ++i) {
    max_perp = std::max(max_perp, std::hypot(s[0][i], s[1][i]));
    min_up = std::min(min_up, 1.0 + s[2][i]);
    min_down = std::min(min_down, 1.0 - s[2][i]);
  }
  pf.G = VectorField3(g);
  for (int k = 0; k < 3; ++k) {
    pf.G[k] = st.u[k];
    pf.G[k] *= p.mass;
    pf.G[k] += p.charge * A[k];
  }
  if (max_perp < 1e-12) {
    bool up = s[2].min() > 0.0, down = s[2].max() < 0.0;
    if (!up && !down) throw InvariantError("spin field sits on both poles with no transverse component");
    pf.reference = 0;
    pf.pole_sign = up ? 1.0 : -1.0;
    return pf;
  }
  VectorField3 g1 = gradient(s[0]);
  VectorField3 g2 = gradient(s[1]);
  pf.reference = (min_up >= min_down) ? 1 : 2;
  for (std::size_t i = 0; i < g.points(); ++i) {
    for (int k = 0; k < 3; ++k) {
      double w = s[0][i] * g2[k][i] - s[1][i] * g1[k][i];
      if (pf.reference == 1)
        pf.G[k][i] -= p.hbar * w / (2.0 * (1.0 + s[2][i]));
      else
        pf.G[k][i] += p.hbar * w / (2.0 * (1.0 - s[2][i]));
    }
  }
  require_finite(pf.G, "phase gradient");
  return pf;
}

}  // namespace

Vec3 winding_numbers(const HydroState& state, const Vec3& A, const PhysParams& p) {
  PhaseForm pf = phase_form(state, A, p);
  const Grid& g = state.grid();
  Vec3 n{0, 0, 0};
  for (int a = 0; a < g.dim(); ++a) n[a] = pf.G[a].mean() * g.length(a) / (2.0 * std::numbers::pi * p.hbar);
  return n;
}

SpinorField reconstruct_spinor(const HydroState& state, const Vec3& A, const PhysParams& p, const Index3& anchor) {
  const Grid& g = state.grid();
  for (std::size_t i = 0; i < g.points(); ++i)
    if (!(state.rho[i] > 0.0)) throw InvariantError("reconstruction requires positive density");
  check_unit_spin(state.s, 1e-8);
  PhaseForm pf = phase_form(state, A, p);

  // winding part
  Vec3 n{0, 0, 0}, defect{0, 0, 0};
  bool bad = false;
  for (int a = 0; a < g.dim(); ++a) {
    n[a] = pf.G[a].mean() * g.length(a) / (2.0 * std::numbers::pi * p.hbar);
    defect[a] = n[a] - std::round(n[a]);
    if (std::abs(defect[a]) > 1e-6) bad = true;
    n[a] = std::round(n[a]);
  }
  if (bad)
    throw ReconstructionError("phase circulation is not quantized (defects " + std::to_string(defect[0]) + ", " +
                                  std::to_string(defect[1]) + ", " + std::to_string(defect[2]) + ")",
                              defect);

  ScalarField theta = inverse_gradient(pf.G);
  for (std::size_t i = 0; i < g.points(); ++i) {
    Vec3 x = g.position(i);
    for (int a = 0; a < g.dim(); ++a) theta[i] += 2.0 * std::numbers::pi * p.hbar * n[a] / g.length(a) * x[a];
  }
  double theta0 = theta[g.flatten(anchor)];

  SpinorField out{ComplexField(g), ComplexField(g)};
  for (std::size_t i = 0; i < g.points(); ++i) {
    double r = state.rho[i];
    double s3 = std::clamp(state.s[2][i], -1.0, 1.0);
    double r1 = 0.5 * r * (1.0 + s3), r2 = 0.5 * r * (1.0 - s3);
    cplx ph = std::polar(1.0, (theta[i] - theta0) / p.hbar);
    if (pf.reference == 0) {
      (pf.pole_sign > 0 ? out.psi1 : out.psi2)[i] = std::sqrt(r) * ph;
      continue;
    }
    double perp = std::hypot(state.s[0][i], state.s[1][i]);
    cplx e = perp > 0.0 ? cplx(state.s[0][i] / perp, state.s[1][i] / perp) : cplx(1.0, 0.0);
    if (pf.reference == 1) {
      out.psi1[i] = std::sqrt(r1) * ph;
      out.psi2[i] = std::sqrt(r2) * ph * e;
    } else {
      out.psi2[i] = std::sqrt(r2) * ph;
      out.psi1[i] = std::sqrt(r1) * ph * std::conj(e);
    }
  }
  return out;
}

ScalarField quantum_potential(const ScalarField& rho, const PhysParams& p) {
  ScalarField a(rho.grid());
  for (std::size_t i = 0; i < rho.size(); ++i) {
    if (!(rho[i] > 0.0)) throw InvariantError("quantum potential requires positive density");
    a[i] = std::sqrt(rho[i]);
  }
  ScalarField lap = laplacian(a);
  const double c = -p.hbar * p.hbar / (2.0 * p.mass);
  for (std::size_t i = 0; i < a.size(); ++i) lap[i] = c * lap[i] / a[i];
  return lap;
}

namespace {

// grads[k] = grad s_k
std::array<VectorField3, 3> spin_gradients(const VectorField3& s) {
  return {gradient(s[0]), gradient(s[1]), gradient(s[2])};
}

}  // namespace

SymTensor3 spin_stress(const ScalarField& rho, const VectorField3& s, const PhysParams& p) {
  const Grid& g = rho.grid();
  auto gs = spin_gradients(s);
  SymTensor3 pi(g);
  const double c = p.hbar * p.hbar / (4.0 * p.mass);
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      ScalarField& t = pi(i, j);
      for (std::size_t n = 0; n < g.points(); ++n) {
        double acc = 0.0;
        for (int k = 0; k < 3; ++k) acc += gs[k][i][n] * gs[k][j][n];
        t[n] = c * rho[n] * acc;
      }
    }
  return pi;
}

SymTensor3 spin_stress_angles(const ScalarField& rho, const VectorField3& s, const PhysParams& p,
                              std::size_t* masked) {
  const Grid& g = rho.grid();
  ScalarField eta(g);
  for (std::size_t n = 0; n < g.points(); ++n) eta[n] = std::acos(std::clamp(s[2][n], -1.0, 1.0));
  VectorField3 geta = gradient(eta);
  VectorField3 gphi = azimuth_gradient(s);
  SymTensor3 pi(g);
  std::size_t count = 0;
  const double c = p.hbar * p.hbar / (4.0 * p.mass);
  for (std::size_t n = 0; n < g.points(); ++n) {
    double se = std::sin(eta[n]);
    if (se < 1e-6) {
      ++count;
      continue;
    }
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j)
        pi(i, j)[n] = c * rho[n] * (geta[i][n] * geta[j][n] + se * se * gphi[i][n] * gphi[j][n]);
  }
  if (masked) *masked = count;
  return pi;
}

VectorField3 spin_velocity(const ScalarField& rho, const VectorField3& s, const PhysParams& p) {
  for (std::size_t i = 0; i < rho.size(); ++i)
    if (!(rho[i] > 0.0)) throw InvariantError("spin velocity requires positive density");
  VectorField3 glr = gradient(rho);
  for (int k = 0; k < 3; ++k)
    for (std::size_t i = 0; i < rho.size(); ++i) glr[k][i] /= rho[i];
  VectorField3 v = cross(glr, s) + curl(s);
  v *= p.c_g * p.hbar / (2.0 * p.mass);
  return v;
}

ScalarField spin_helicity(const VectorField3& s) { return dot(s, curl(s)); }

Residual relative_residual(const std::vector<const ScalarField*>& lhs, const std::vector<const ScalarField*>& rhs,
                           const std::vector<unsigned char>* mask) {
  double scale = 0.0, l2s = 0.0, maxd = 0.0, l2d = 0.0;
  for (std::size_t c = 0; c < lhs.size(); ++c) {
    const ScalarField& a = *lhs[c];
    const ScalarField& b = *rhs[c];
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (mask && !(*mask)[i]) continue;
      double d = a[i] - b[i];
      scale = std::max({scale, std::abs(a[i]), std::abs(b[i])});
      l2s += std::max(a[i] * a[i], b[i] * b[i]);
      maxd = std::max(maxd, std::abs(d));
      l2d += d * d;
    }
  }
  Residual r;
  r.max_rel = scale > 0.0 ? maxd / scale : maxd;
  r.l2_rel = l2s > 0.0 ? std::sqrt(l2d / l2s) : std::sqrt(l2d);
  return r;
}

namespace {

IdentityRow make_row(const std::string& name, const Residual& r, std::size_t masked) {
  IdentityRow row;
  row.name = name;
  row.max_residual = r.max_rel;
  row.l2_residual = r.l2_rel;
  row.masked = masked;
  return row;
}

IdentityRow integral_row(const std::string& name, double lhs, double rhs) {
  IdentityRow row;
  row.name = name;
  row.integral = true;
  double scale = std::max(std::abs(lhs), std::abs(rhs));
  double d = std::abs(lhs - rhs);
  row.max_residual = scale > 0.0 ? d / scale : d;
  row.l2_residual = row.max_residual;
  return row;
}

}  // namespace

IdentityReport verify_identities(const SpinorField& psi, const VectorField3& B, const Vec3& A, const PhysParams& p) {
  const Grid& g = psi.grid();
  const std::size_t np = g.points();
  const double hb = p.hbar, m = p.mass, q = p.charge;
  IdentityReport rep;

  ScalarField r1 = psi.psi1.abs2(), r2 = psi.psi2.abs2();
  HydroState st = forward_transform(psi, A, p, VacuumPolicy::permit);
  const ScalarField& rho = st.rho;

  // masks: points where both components carry density and sin(eta) is not tiny
  std::vector<unsigned char> ok(np, 1);
  std::size_t masked = 0;
  ScalarField eta(g);
  for (std::size_t i = 0; i < np; ++i) {
    eta[i] = std::acos(std::clamp(st.s[2][i], -1.0, 1.0));
    if (std::sin(eta[i]) < 1e-6 || !(r1[i] > 0.0) || !(r2[i] > 0.0)) {
      ok[i] = 0;
      ++masked;
    }
  }
  bool constant = rho.max() - rho.min() == 0.0 && st.u.max_abs() == 0.0;
  (void)constant;

  // amplitudes sqrt(rho_i) = |psi_i| and the component quantum potentials
  ScalarField a1(g), a2(g), a(g);
  for (std::size_t i = 0; i < np; ++i) {
    a1[i] = std::abs(psi.psi1[i]);
    a2[i] = std::abs(psi.psi2[i]);
    a[i] = std::sqrt(rho[i]);
  }
  ScalarField la1 = laplacian(a1), la2 = laplacian(a2);

  // 1. Zeeman terms
  {
    ScalarField lhs(g), rhs(g);
    const double c = -q * hb / (2.0 * m);
    for (std::size_t i = 0; i < np; ++i) {
      rhs[i] = c * rho[i] * (B[0][i] * st.s[0][i] + B[1][i] * st.s[1][i] + B[2][i] * st.s[2][i]);
      if (!ok[i]) continue;
      cplx z = std::conj(psi.psi1[i]) * psi.psi2[i];
      double cphi = z.real() / std::abs(z), sphi = z.imag() / std::abs(z);
      double bt = B[0][i] * cphi + B[1][i] * sphi;
      double M1 = c * (B[2][i] + std::sqrt(r2[i] / r1[i]) * bt);
      double M2 = c * (-B[2][i] + std::sqrt(r1[i] / r2[i]) * bt);
      lhs[i] = r1[i] * M1 + r2[i] * M2;
    }
    rep.rows.push_back(make_row("M_combined", relative_residual({&lhs}, {&rhs}, &ok), masked));
  }

  // 2. combined quantum potential
  VectorField3 geta = gradient(eta);
  {
    ScalarField Q = quantum_potential(rho, p);
    ScalarField lhs(g), rhs(g);
    const double c = -hb * hb / (2.0 * m);
    for (std::size_t i = 0; i < np; ++i) {
      lhs[i] = c * (a1[i] * la1[i] + a2[i] * la2[i]);
      double ge2 = geta[0][i] * geta[0][i] + geta[1][i] * geta[1][i] + geta[2][i] * geta[2][i];
      rhs[i] = rho[i] * Q[i] + hb * hb / (8.0 * m) * rho[i] * ge2;
    }
    rep.rows.push_back(make_row("Vq_combined", relative_residual({&lhs}, {&rhs}, &ok), masked));
  }

  // 3. momentum flux split
  VectorField3 gphi = azimuth_gradient(st.s);
  {
    auto d1 = complex_gradient(psi.psi1);
    auto d2 = complex_gradient(psi.psi2);
    SymTensor3 lhs(g), rhs(g);
    for (std::size_t n = 0; n < np; ++n) {
      if (!ok[n]) continue;
      Vec3 p1{}, p2{};
      for (int k = 0; k < 3; ++k) {
        p1[k] = hb * (std::conj(psi.psi1[n]) * d1[k][n]).imag() / r1[n] - q * A[k];
        p2[k] = hb * (std::conj(psi.psi2[n]) * d2[k][n]).imag() / r2[n] - q * A[k];
      }
      double se = std::sin(eta[n]);
      for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) {
          lhs(i, j)[n] = r1[n] * p1[i] * p1[j] + r2[n] * p2[i] * p2[j];
          rhs(i, j)[n] = m * m * rho[n] * st.u[i][n] * st.u[j][n] +
                         rho[n] * hb * hb / 4.0 * se * se * gphi[i][n] * gphi[j][n];
        }
    }
    std::vector<const ScalarField*> L, R;
    for (int k = 0; k < 6; ++k) {
      L.push_back(&lhs.component(k));
      R.push_back(&rhs.component(k));
    }
    rep.rows.push_back(make_row("flux_split", relative_residual(L, R, &ok), masked));
  }

  // 4. difference of component quantum potentials
  {
    VectorField3 flux = geta;
    flux *= rho;
    ScalarField div = divergence(flux);
    ScalarField lhs(g), rhs(g);
    const double c = -hb * hb / (2.0 * m);
    for (std::size_t i = 0; i < np; ++i) {
      if (!ok[i]) continue;
      lhs[i] = c * (la2[i] / a2[i] - la1[i] / a1[i]);
      rhs[i] = c * div[i] / (rho[i] * std::sin(eta[i]));
    }
    rep.rows.push_back(make_row("Vq_difference", relative_residual({&lhs}, {&rhs}, &ok), masked));
  }

  // 5. spin stress, gradient form against angle form
  {
    SymTensor3 pa = spin_stress(rho, st.s, p);
    std::size_t pm = 0;
    SymTensor3 pb = spin_stress_angles(rho, st.s, p, &pm);
    std::vector<const ScalarField*> L, R;
    for (int k = 0; k < 6; ++k) {
      L.push_back(&pa.component(k));
      R.push_back(&pb.component(k));
    }
    rep.rows.push_back(make_row("Pi_spin", relative_residual(L, R, &ok), masked));
  }

  // 6. Frobenius norm decomposition
  {
    IdentityReport fr = verify_energy_split(st, p);
    if (const IdentityRow* r = fr.find("FrobNorm")) rep.rows.push_back(*r);
  }
  return rep;
}

IdentityReport verify_energy_split(const HydroState& st, const PhysParams& p) {
  const Grid& g = st.grid();
  const std::size_t np = g.points();
  const auto& s = st.s;
  const auto& rho = st.rho;
  IdentityReport rep;

  auto gs = spin_gradients(s);
  VectorField3 cs = curl(s);
  ScalarField ds = divergence(s);
  // X = (s.grad)s - (div s) s
  VectorField3 X(g);
  for (int k = 0; k < 3; ++k)
    for (std::size_t n = 0; n < np; ++n) {
      double adv = 0.0;
      for (int a = 0; a < 3; ++a) adv += s[a][n] * gs[k][a][n];
      X[k][n] = adv - ds[n] * s[k][n];
    }
  ScalarField divX = divergence(X);
  ScalarField grad2(g), rhs(g);
  for (std::size_t n = 0; n < np; ++n) {
    double acc = 0.0;
    for (int k = 0; k < 3; ++k)
      for (int a = 0; a < 3; ++a) acc += gs[k][a][n] * gs[k][a][n];
    grad2[n] = acc;
    double c2 = cs[0][n] * cs[0][n] + cs[1][n] * cs[1][n] + cs[2][n] * cs[2][n];
    rhs[n] = c2 + ds[n] * ds[n] + divX[n];
  }
  rep.rows.push_back(make_row("FrobNorm", relative_residual({&grad2}, {&rhs}), 0));

  bool positive = true;
  for (std::size_t n = 0; n < np; ++n)
    if (!(rho[n] > 0.0)) positive = false;
  if (!positive) return rep;

  const double c = p.c_g * p.c_g * p.hbar * p.hbar / (8.0 * p.mass);
  VectorField3 glr = gradient(rho);
  for (int k = 0; k < 3; ++k)
    for (std::size_t n = 0; n < np; ++n) glr[k][n] /= rho[n];

  VectorField3 vs = spin_velocity(rho, s, p);
  ScalarField ks_density(g), ks_expanded(g), eq(g), eds(g), er(g);
  for (std::size_t n = 0; n < np; ++n) {
    Vec3 l{glr[0][n], glr[1][n], glr[2][n]};
    Vec3 sv = s.at(n);
    Vec3 cv{cs[0][n], cs[1][n], cs[2][n]};
    Vec3 lxs{l[1] * sv[2] - l[2] * sv[1], l[2] * sv[0] - l[0] * sv[2], l[0] * sv[1] - l[1] * sv[0]};
    double l2 = l[0] * l[0] + l[1] * l[1] + l[2] * l[2];
    double ls = l[0] * sv[0] + l[1] * sv[1] + l[2] * sv[2];
    double c2 = cv[0] * cv[0] + cv[1] * cv[1] + cv[2] * cv[2];
    double cross_term = lxs[0] * cv[0] + lxs[1] * cv[1] + lxs[2] * cv[2];
    double v2 = vs[0][n] * vs[0][n] + vs[1][n] * vs[1][n] + vs[2][n] * vs[2][n];
    ks_density[n] = 0.5 * p.mass * rho[n] * v2;
    ks_expanded[n] = c * rho[n] * (l2 - ls * ls + 2.0 * cross_term + c2);
    eq[n] = c * rho[n] * l2;
    eds[n] = c * rho[n] * grad2[n];
    er[n] = c * rho[n] * divX[n];
  }
  double Ks = integrate(ks_density);
  rep.rows.push_back(integral_row("Ks_expansion", Ks, integrate(ks_expanded)));
  rep.rows.push_back(integral_row("Ks_split", Ks, integrate(eq) + integrate(eds) + integrate(er)));

  VectorField3 rs = s;
  rs *= rho;
  ScalarField drs = divergence(rs);
  IdentityRow ansatz;
  ansatz.name = "div_rho_s";
  double scale = 0.0;
  for (int k = 0; k < 3; ++k) scale = std::max(scale, gradient(rs[k]).max_abs());
  ansatz.max_residual = scale > 0.0 ? drs.max_abs() / scale : drs.max_abs();
  ansatz.l2_residual = ansatz.max_residual;
  rep.rows.push_back(ansatz);
  return rep;
}

}  // namespace sf
