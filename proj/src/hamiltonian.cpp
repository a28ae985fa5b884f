#include "spinfluid/hamiltonian.hpp"

#include <algorithm>
#include <cmath>

#include "spinfluid/errors.hpp"
#include "spinfluid/random.hpp"
#include "spinfluid/spectral.hpp"

namespace sf {

namespace {

double grad_coeff(const PhysParams& p) { return p.c_g * p.c_g * p.hbar * p.hbar / (8.0 * p.mass); }
double zeeman_coeff(const PhysParams& p) { return p.c_g * p.kappa_s * p.charge * p.hbar / (2.0 * p.mass); }

void require_positive(const ScalarField& rho, const char* what) {
  for (std::size_t i = 0; i < rho.size(); ++i)
    if (!(rho[i] > 0.0)) throw InvariantError(std::string(what) + " requires positive density");
}

double sum_grad2(const std::array<VectorField3, 3>& gs, std::size_t i) {
  double acc = 0.0;
  for (int k = 0; k < 3; ++k)
    for (int a = 0; a < 3; ++a) acc += gs[k][a][i] * gs[k][a][i];
  return acc;
}

Vec3 cross3(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
double dot3(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
double norm3(const Vec3& a) { return std::sqrt(dot3(a, a)); }

}  // namespace

EnergyTerms energy_terms(const HydroState& st, const FieldConfig& f, const PhysParams& p) {
  const Grid& g = st.grid();
  ScalarField a(g);
  for (std::size_t i = 0; i < g.points(); ++i) a[i] = std::sqrt(std::max(st.rho[i], 0.0));
  VectorField3 ga = gradient(a);
  std::array<VectorField3, 3> gs{gradient(st.s[0]), gradient(st.s[1]), gradient(st.s[2])};
  const double c = grad_coeff(p), cz = zeeman_coeff(p);
  std::array<ScalarField, 7> d;
  for (auto& x : d) x = ScalarField(g);
  for (std::size_t i = 0; i < g.points(); ++i) {
    const double r = st.rho[i];
    Vec3 u = st.u.at(i);
    double ga2 = ga[0][i] * ga[0][i] + ga[1][i] * ga[1][i] + ga[2][i] * ga[2][i];
    d[0][i] = 0.5 * p.mass * r * dot3(u, u);
    if (f.has_phi()) d[1][i] = p.charge * f.phi[i] * r;
    if (!p.V.empty()) d[2][i] = p.V[i] * r;
    d[3][i] = p.pressure.h(r);
    d[4][i] = 4.0 * c * ga2;
    d[5][i] = c * r * sum_grad2(gs, i);
    if (!f.b.empty()) d[6][i] = -cz * r * dot3(f.b.at(i), st.s.at(i));
  }
  EnergyTerms e;
  e.kinetic = integrate(d[0]);
  e.electrostatic = integrate(d[1]);
  e.external = integrate(d[2]);
  e.internal = integrate(d[3]);
  e.quantum = integrate(d[4]);
  e.spin_gradient = integrate(d[5]);
  e.zeeman = integrate(d[6]);
  return e;
}

double total_energy(const HydroState& st, const FieldConfig& f, const PhysParams& p, double t) {
  (void)t;
  const Grid& g = st.grid();
  ScalarField a(g);
  for (std::size_t i = 0; i < g.points(); ++i) a[i] = std::sqrt(std::max(st.rho[i], 0.0));
  VectorField3 ga = gradient(a);
  std::array<VectorField3, 3> gs{gradient(st.s[0]), gradient(st.s[1]), gradient(st.s[2])};
  const double c = grad_coeff(p), cz = zeeman_coeff(p);
  ScalarField e(g);
  for (std::size_t i = 0; i < g.points(); ++i) {
    const double r = st.rho[i];
    Vec3 u = st.u.at(i);
    double pot = (f.has_phi() ? p.charge * f.phi[i] : 0.0) + (p.V.empty() ? 0.0 : p.V[i]);
    double ga2 = ga[0][i] * ga[0][i] + ga[1][i] * ga[1][i] + ga[2][i] * ga[2][i];
    e[i] = r * (0.5 * p.mass * dot3(u, u) + pot) + p.pressure.h(r) + c * (4.0 * ga2 + r * sum_grad2(gs, i));
    if (!f.b.empty()) e[i] -= cz * r * dot3(f.b.at(i), st.s.at(i));
  }
  return integrate(e);
}

FunctionalDerivatives functional_derivatives(const HydroState& st, const FieldConfig& f, const PhysParams& p,
                                             double t) {
  (void)t;
  const Grid& g = st.grid();
  require_positive(st.rho, "functional derivatives");
  ScalarField Q = quantum_potential(st.rho, p);
  std::array<VectorField3, 3> gs{gradient(st.s[0]), gradient(st.s[1]), gradient(st.s[2])};
  const double c = grad_coeff(p), cz = zeeman_coeff(p);
  FunctionalDerivatives d{ScalarField(g), VectorField3(g), VectorField3(g)};
  for (std::size_t i = 0; i < g.points(); ++i) {
    const double r = st.rho[i];
    Vec3 u = st.u.at(i);
    double pot = (f.has_phi() ? p.charge * f.phi[i] : 0.0) + (p.V.empty() ? 0.0 : p.V[i]);
    d.drho[i] = 0.5 * p.mass * dot3(u, u) + pot + p.pressure.dh(r) + p.c_g * p.c_g * Q[i] + c * sum_grad2(gs, i);
    if (!f.b.empty()) d.drho[i] -= cz * dot3(f.b.at(i), st.s.at(i));
    d.du.set(i, {p.mass * r * u[0], p.mass * r * u[1], p.mass * r * u[2]});
  }
  for (int k = 0; k < 3; ++k) {
    VectorField3 flux = gs[k];
    flux *= st.rho;
    ScalarField dv = divergence(flux);
    for (std::size_t i = 0; i < g.points(); ++i) {
      d.ds[k][i] = -2.0 * c * dv[i];
      if (!f.b.empty()) d.ds[k][i] -= cz * st.rho[i] * f.b[k][i];
    }
  }
  return d;
}

HydroRates bracket_rhs(const HydroState& st, const FieldConfig& f, const PhysParams& p, double t) {
  const Grid& g = st.grid();
  const double m = p.mass;
  FunctionalDerivatives d = functional_derivatives(st, f, p, t);
  std::array<VectorField3, 3> gs{gradient(st.s[0]), gradient(st.s[1]), gradient(st.s[2])};
  VectorField3 w = curl(st.u);  // A is uniform, so curl(u + qA/m) = curl u
  VectorField3 gH = gradient(d.drho);
  Vec3 Adot = f.dA_dt();

  HydroRates r{divergence(d.du), VectorField3(g), VectorField3(g)};
  r.drho *= -1.0 / m;
  const double cs = 2.0 / (p.c_g * p.hbar);
  for (std::size_t i = 0; i < g.points(); ++i) {
    const double rho = st.rho[i];
    Vec3 Hu = d.du.at(i), Hs = d.ds.at(i), s = st.s.at(i);
    Vec3 wxH = cross3(w.at(i), Hu);
    Vec3 du{}, ds{};
    for (int c = 0; c < 3; ++c) {
      double spin = Hs[0] * gs[0][c][i] + Hs[1] * gs[1][c][i] + Hs[2] * gs[2][c][i];
      du[c] = -gH[c][i] / m - wxH[c] / (m * rho) + spin / (m * rho) - p.charge * Adot[c] / m;
    }
    Vec3 sxH = cross3(s, Hs);
    for (int k = 0; k < 3; ++k) {
      double adv = Hu[0] * gs[k][0][i] + Hu[1] * gs[k][1][i] + Hu[2] * gs[k][2][i];
      ds[k] = -adv / (m * rho) - cs * sxH[k] / rho;
    }
    r.du.set(i, du);
    r.ds.set(i, ds);
  }
  return r;
}

LiePoissonState to_lie_poisson(const HydroState& st, const Vec3& A, const PhysParams& p) {
  const Grid& g = st.grid();
  LiePoissonState lp{st.rho, VectorField3(g), VectorField3(g)};
  const double cs = p.c_g * p.hbar / 2.0;
  for (std::size_t i = 0; i < g.points(); ++i)
    for (int c = 0; c < 3; ++c) {
      lp.M[c][i] = st.rho[i] * (p.mass * st.u[c][i] + p.charge * A[c]);
      lp.Sigma[c][i] = cs * st.rho[i] * st.s[c][i];
    }
  return lp;
}

HydroState from_lie_poisson(const LiePoissonState& lp, const Vec3& A, const PhysParams& p) {
  const Grid& g = lp.rho.grid();
  require_positive(lp.rho, "inverse momentum map");
  HydroState st{lp.rho, VectorField3(g), VectorField3(g)};
  const double cs = 2.0 / (p.c_g * p.hbar);
  for (std::size_t i = 0; i < g.points(); ++i)
    for (int c = 0; c < 3; ++c) {
      st.u[c][i] = lp.M[c][i] / (p.mass * lp.rho[i]) - p.charge * A[c] / p.mass;
      st.s[c][i] = cs * lp.Sigma[c][i] / lp.rho[i];
    }
  return st;
}

FunctionalDerivatives lie_poisson_derivatives(const HydroState& st, const FunctionalDerivatives& d, const Vec3& A,
                                              const PhysParams& p) {
  const Grid& g = st.grid();
  LiePoissonState lp = to_lie_poisson(st, A, p);
  FunctionalDerivatives o{ScalarField(g), VectorField3(g), VectorField3(g)};
  const double cs = 2.0 / (p.c_g * p.hbar);
  for (std::size_t i = 0; i < g.points(); ++i) {
    const double r = st.rho[i];
    Vec3 FM{}, FS{};
    for (int c = 0; c < 3; ++c) {
      FM[c] = d.du[c][i] / (p.mass * r);
      FS[c] = cs * d.ds[c][i] / r;
    }
    o.du.set(i, FM);
    o.ds.set(i, FS);
    o.drho[i] = d.drho[i] - dot3(lp.M.at(i), FM) / r - dot3(lp.Sigma.at(i), FS) / r;
  }
  return o;
}

double poisson_bracket(const HydroState& st, const FunctionalDerivatives& F, const FunctionalDerivatives& G,
                       const Vec3& A, const PhysParams& p, double* scale) {
  (void)A;
  const Grid& g = st.grid();
  const double m = p.mass;
  ScalarField divG = divergence(G.du);
  VectorField3 gradG = gradient(G.drho);
  VectorField3 w = curl(st.u);
  std::array<VectorField3, 3> gs{gradient(st.s[0]), gradient(st.s[1]), gradient(st.s[2])};
  const double cs = 2.0 / (p.c_g * p.hbar);
  ScalarField integrand(g), absval(g);
  for (std::size_t i = 0; i < g.points(); ++i) {
    const double r = st.rho[i];
    Vec3 Fu = F.du.at(i), Gu = G.du.at(i), Fs = F.ds.at(i), Gs = G.ds.at(i);
    double terms[5];
    terms[0] = -F.drho[i] * divG[i] / m;
    terms[1] = -dot3(Fu, gradG.at(i)) / m;
    terms[2] = -dot3(Fu, cross3(w.at(i), Gu)) / (m * r);
    double t3 = 0.0;
    for (int k = 0; k < 3; ++k) {
      Vec3 gk = gs[k].at(i);
      t3 += Gs[k] * dot3(Fu, gk) - Fs[k] * dot3(Gu, gk);
    }
    terms[3] = t3 / (m * r);
    terms[4] = -cs * dot3(Fs, cross3(st.s.at(i), Gs)) / r;
    double sum = 0.0;
    for (double v : terms) sum += v;
    integrand[i] = sum;
    double mag = std::abs(F.drho[i] * divG[i]) / m + norm3(Fu) * norm3(gradG.at(i)) / m +
                 norm3(Fu) * norm3(w.at(i)) * norm3(Gu) / (m * r) + cs * norm3(Fs) * norm3(Gs) / r;
    for (int k = 0; k < 3; ++k)
      mag += (std::abs(Gs[k]) * norm3(Fu) + std::abs(Fs[k]) * norm3(Gu)) * norm3(gs[k].at(i)) / (m * r);
    absval[i] = mag;
  }
  if (scale) *scale = integrate(absval);
  return integrate(integrand);
}

double lie_poisson_bracket(const LiePoissonState& lp, const FunctionalDerivatives& F, const FunctionalDerivatives& G,
                           double* scale) {
  const Grid& g = lp.rho.grid();
  std::array<VectorField3, 3> gFM{gradient(F.du[0]), gradient(F.du[1]), gradient(F.du[2])};
  std::array<VectorField3, 3> gGM{gradient(G.du[0]), gradient(G.du[1]), gradient(G.du[2])};
  std::array<VectorField3, 3> gFS{gradient(F.ds[0]), gradient(F.ds[1]), gradient(F.ds[2])};
  std::array<VectorField3, 3> gGS{gradient(G.ds[0]), gradient(G.ds[1]), gradient(G.ds[2])};
  VectorField3 gFr = gradient(F.drho), gGr = gradient(G.drho);
  ScalarField integrand(g), absval(g);
  for (std::size_t i = 0; i < g.points(); ++i) {
    Vec3 FM = F.du.at(i), GM = G.du.at(i), M = lp.M.at(i), S = lp.Sigma.at(i);
    double terms[4] = {0.0, 0.0, 0.0, 0.0};
    for (int c = 0; c < 3; ++c) {
      double a = FM[0] * gGM[c][0][i] + FM[1] * gGM[c][1][i] + FM[2] * gGM[c][2][i];
      double b = GM[0] * gFM[c][0][i] + GM[1] * gFM[c][1][i] + GM[2] * gFM[c][2][i];
      terms[0] -= M[c] * (a - b);
      double sa = dot3(FM, gGS[c].at(i)) - dot3(GM, gFS[c].at(i));
      terms[2] -= S[c] * sa;
    }
    terms[1] = -lp.rho[i] * (dot3(FM, gGr.at(i)) - dot3(GM, gFr.at(i)));
    terms[3] = dot3(S, cross3(F.ds.at(i), G.ds.at(i)));
    double sum = 0.0;
    for (double v : terms) sum += v;
    integrand[i] = sum;
    double mag = norm3(S) * norm3(F.ds.at(i)) * norm3(G.ds.at(i));
    for (int c = 0; c < 3; ++c) {
      mag += std::abs(M[c]) * (norm3(FM) * norm3(gGM[c].at(i)) + norm3(GM) * norm3(gFM[c].at(i)));
      mag += std::abs(S[c]) * (norm3(FM) * norm3(gGS[c].at(i)) + norm3(GM) * norm3(gFS[c].at(i)));
    }
    mag += lp.rho[i] * (norm3(FM) * norm3(gGr.at(i)) + norm3(GM) * norm3(gFr.at(i)));
    absval[i] = mag;
  }
  if (scale) *scale = integrate(absval);
  return integrate(integrand);
}

std::vector<TestFunctional> test_functionals(const Grid& g, std::uint64_t seed, const FieldConfig& fields,
                                             const PhysParams& p) {
  CounterRng rng(seed, 0x7465737466ULL);
  Vec3 av{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
  Vec3 bv{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
  VectorField3 gfield(g), cfield(g);
  for (int k = 0; k < 3; ++k) {
    gfield[k] = random_bandlimited(g, rng, 3, 1.0);
    cfield[k] = random_bandlimited(g, rng, 3, 1.0);
  }
  auto zero = [g]() { return FunctionalDerivatives{ScalarField(g), VectorField3(g), VectorField3(g)}; };
  std::vector<TestFunctional> out;

  out.push_back({"rho_squared", [](const HydroState& st) { return 0.5 * integrate(st.rho * st.rho); },
                 [zero](const HydroState& st) {
                   auto d = zero();
                   d.drho = st.rho;
                   return d;
                 }});
  out.push_back({"kinetic",
                 [](const HydroState& st) { return 0.5 * integrate(st.rho * dot(st.u, st.u)); },
                 [zero](const HydroState& st) {
                   auto d = zero();
                   d.drho = dot(st.u, st.u);
                   d.drho *= 0.5;
                   d.du = st.u;
                   d.du *= st.rho;
                   return d;
                 }});
  out.push_back({"cubic",
                 [av, bv](const HydroState& st) {
                   ScalarField e(st.grid());
                   for (std::size_t i = 0; i < e.size(); ++i)
                     e[i] = st.rho[i] * dot3(av, st.s.at(i)) * dot3(bv, st.u.at(i));
                   return integrate(e);
                 },
                 [zero, av, bv](const HydroState& st) {
                   auto d = zero();
                   for (std::size_t i = 0; i < d.drho.size(); ++i) {
                     double as = dot3(av, st.s.at(i)), bu = dot3(bv, st.u.at(i));
                     d.drho[i] = as * bu;
                     d.du.set(i, {st.rho[i] * as * bv[0], st.rho[i] * as * bv[1], st.rho[i] * as * bv[2]});
                     d.ds.set(i, {st.rho[i] * bu * av[0], st.rho[i] * bu * av[1], st.rho[i] * bu * av[2]});
                   }
                   return d;
                 }});
  out.push_back({"linear_u", [gfield](const HydroState& st) { return integrate(dot(gfield, st.u)); },
                 [zero, gfield](const HydroState&) {
                   auto d = zero();
                   d.du = gfield;
                   return d;
                 }});
  out.push_back({"spin_weight", [cfield](const HydroState& st) { return integrate(st.rho * dot(cfield, st.s)); },
                 [zero, cfield](const HydroState& st) {
                   auto d = zero();
                   d.drho = dot(cfield, st.s);
                   d.ds = cfield;
                   d.ds *= st.rho;
                   return d;
                 }});
  out.push_back({"mass", [](const HydroState& st) { return integrate(st.rho); },
                 [zero, g](const HydroState&) {
                   auto d = zero();
                   d.drho = ScalarField(g, 1.0);
                   return d;
                 }});
  out.push_back({"energy", [fields, p](const HydroState& st) { return total_energy(st, fields, p); },
                 [fields, p](const HydroState& st) { return functional_derivatives(st, fields, p); }});
  return out;
}

double bracket_antisymmetry_check(const HydroState& st, const TestFunctional& F, const TestFunctional& G,
                                  const Vec3& A, const PhysParams& p) {
  FunctionalDerivatives dF = F.derivatives(st), dG = G.derivatives(st);
  double sF = 0.0, sG = 0.0;
  double fg = poisson_bracket(st, dF, dG, A, p, &sF);
  double gf = poisson_bracket(st, dG, dF, A, p, &sG);
  double den = std::abs(fg) > 1e-10 * sF ? std::abs(fg) : sF;
  if (den == 0.0) return std::abs(fg + gf);
  return std::abs(fg + gf) / den;
}

double rates_difference(const HydroRates& a, const HydroRates& b) {
  auto group = [](std::vector<const ScalarField*> x, std::vector<const ScalarField*> y) {
    double d = 0.0, s = 0.0;
    for (std::size_t c = 0; c < x.size(); ++c)
      for (std::size_t i = 0; i < x[c]->size(); ++i) {
        d = std::max(d, std::abs((*x[c])[i] - (*y[c])[i]));
        s = std::max({s, std::abs((*x[c])[i]), std::abs((*y[c])[i])});
      }
    return s > 0.0 ? d / s : d;
  };
  double r = group({&a.drho}, {&b.drho});
  r = std::max(r, group({&a.du[0], &a.du[1], &a.du[2]}, {&b.du[0], &b.du[1], &b.du[2]}));
  r = std::max(r, group({&a.ds[0], &a.ds[1], &a.ds[2]}, {&b.ds[0], &b.ds[1], &b.ds[2]}));
  return r;
}

namespace {

// central difference of H with respect to one point value, divided by the cell volume
double fd_derivative(const std::function<double(double)>& H_of_shift, double eps, double dV) {
  return (H_of_shift(eps) - H_of_shift(-eps)) / (2.0 * eps * dV);
}

double field_scale(const ScalarField& f) {
  double s = f.max_abs();
  return s > 0.0 ? s : 1.0;
}

}  // namespace

std::vector<CheckRow> structural_checks(const HydroState& st, const FieldConfig& f, const PhysParams& p,
                                        std::uint64_t seed, int fd_points) {
  const Grid& g = st.grid();
  const Vec3 A = f.A(0.0);
  const double dV = g.cell_volume();
  std::vector<CheckRow> rows;

  HydroOptions exact;
  exact.dealias = false;
  rows.push_back({"bracket_vs_hydro", rates_difference(bracket_rhs(st, f, p), hydro_rhs(st, f, p, 0.0, false, exact)),
                  1e-8});

  auto lib = test_functionals(g, seed, f, p);
  std::vector<FunctionalDerivatives> ds;
  for (const auto& F : lib) ds.push_back(F.derivatives(st));

  double anti = 0.0, casimir = 0.0, lp_diff = 0.0;
  LiePoissonState lp = to_lie_poisson(st, A, p);
  std::vector<FunctionalDerivatives> dlp;
  for (const auto& d : ds) dlp.push_back(lie_poisson_derivatives(st, d, A, p));
  std::size_t mass_index = 0, energy_index = 0;
  for (std::size_t i = 0; i < lib.size(); ++i) {
    if (lib[i].name == "mass") mass_index = i;
    if (lib[i].name == "energy") energy_index = i;
  }
  for (std::size_t i = 0; i < lib.size(); ++i)
    for (std::size_t j = i; j < lib.size(); ++j) {
      double sa = 0.0, sb = 0.0;
      double fg = poisson_bracket(st, ds[i], ds[j], A, p, &sa);
      double gf = poisson_bracket(st, ds[j], ds[i], A, p, &sb);
      double den = std::abs(fg) > 1e-10 * sa ? std::abs(fg) : sa;
      anti = std::max(anti, den > 0.0 ? std::abs(fg + gf) / den : std::abs(fg + gf));
      if (i == mass_index || j == mass_index) casimir = std::max(casimir, sa > 0.0 ? std::abs(fg) / sa : std::abs(fg));
      if (i != j) {
        double sl = 0.0;
        double lpb = lie_poisson_bracket(lp, dlp[i], dlp[j], &sl);
        double scale = std::max(sa, sl);
        double ref = std::abs(fg) > 1e-6 * scale ? std::abs(fg) : scale;
        lp_diff = std::max(lp_diff, std::abs(fg - lpb) / ref);
      }
    }
  rows.push_back({"antisymmetry", anti, 1e-10});
  rows.push_back({"mass_casimir", casimir, 1e-10});
  {
    double sc = 0.0;
    double hh = poisson_bracket(st, ds[energy_index], ds[energy_index], A, p, &sc);
    rows.push_back({"energy_self_bracket", sc > 0.0 ? std::abs(hh) / sc : std::abs(hh), 1e-12});
  }
  rows.push_back({"lie_poisson_bracket", lp_diff, 1e-8});

  {
    HydroState back = from_lie_poisson(lp, A, p);
    double d = 0.0;
    for (int c = 0; c < 3; ++c) {
      d = std::max(d, (back.u[c] - st.u[c]).max_abs() / std::max(st.u.max_abs(), 1e-300));
      d = std::max(d, (back.s[c] - st.s[c]).max_abs());
    }
    rows.push_back({"lie_poisson_roundtrip", d, 1e-12});
    double nd = 0.0;
    const double cs = p.c_g * p.hbar / 2.0;
    for (std::size_t i = 0; i < g.points(); ++i) {
      Vec3 S = lp.Sigma.at(i);
      nd = std::max(nd, std::abs(std::sqrt(dot3(S, S)) - std::abs(cs) * st.rho[i]) / (std::abs(cs) * st.rho[i]));
    }
    rows.push_back({"spin_density_norm", nd, 1e-12});
  }

  // finite-difference oracles
  const FunctionalDerivatives& dH = ds[energy_index];
  const FunctionalDerivatives& dHlp = dlp[energy_index];
  CounterRng rng(seed, 0x6664ULL);
  std::vector<std::size_t> pts;
  for (int k = 0; k < fd_points; ++k) pts.push_back(static_cast<std::size_t>(rng.next_u64() % g.points()));

  const double rho_scale = field_scale(st.rho);
  double e_rho = 0.0, e_u = 0.0, e_s = 0.0;
  double e_M = 0.0, e_S = 0.0, e_r = 0.0;
  double su = std::max(st.u.max_abs(), 1e-300), ss = 1.0;
  const double M_scale = std::max(lp.M.max_abs(), 1e-300), S_scale = std::max(lp.Sigma.max_abs(), 1e-300);
  double dHu_scale = std::max(dH.du.max_abs(), 1e-300), dHs_scale = std::max(dH.ds.max_abs(), 1e-300);
  double FM_scale = std::max(dHlp.du.max_abs(), 1e-300), FS_scale = std::max(dHlp.ds.max_abs(), 1e-300);
  for (std::size_t i : pts) {
    {
      double eps = 1e-5 * rho_scale;
      double fd = fd_derivative(
          [&](double h) {
            HydroState w = st;
            w.rho[i] += h;
            return total_energy(w, f, p);
          },
          eps, dV);
      e_rho = std::max(e_rho, std::abs(fd - dH.drho[i]) / field_scale(dH.drho));
    }
    for (int c = 0; c < 3; ++c) {
      double eu = 1e-5 * su;
      double fd = fd_derivative(
          [&](double h) {
            HydroState w = st;
            w.u[c][i] += h;
            return total_energy(w, f, p);
          },
          eu, dV);
      e_u = std::max(e_u, std::abs(fd - dH.du[c][i]) / dHu_scale);
      double es = 1e-5 * ss;
      fd = fd_derivative(
          [&](double h) {
            HydroState w = st;
            w.s[c][i] += h;
            return total_energy(w, f, p);
          },
          es, dV);
      e_s = std::max(e_s, std::abs(fd - dH.ds[c][i]) / dHs_scale);

      double eM = 1e-3 * M_scale;
      fd = fd_derivative(
          [&](double h) {
            LiePoissonState w = lp;
            w.M[c][i] += h;
            return total_energy(from_lie_poisson(w, A, p), f, p);
          },
          eM, dV);
      e_M = std::max(e_M, std::abs(fd - dHlp.du[c][i]) / FM_scale);
      double eS = 1e-5 * S_scale;
      fd = fd_derivative(
          [&](double h) {
            LiePoissonState w = lp;
            w.Sigma[c][i] += h;
            return total_energy(from_lie_poisson(w, A, p), f, p);
          },
          eS, dV);
      e_S = std::max(e_S, std::abs(fd - dHlp.ds[c][i]) / FS_scale);
    }
    {
      double eps = 1e-5 * rho_scale;
      double fd = fd_derivative(
          [&](double h) {
            LiePoissonState w = lp;
            w.rho[i] += h;
            return total_energy(from_lie_poisson(w, A, p), f, p);
          },
          eps, dV);
      e_r = std::max(e_r, std::abs(fd - dHlp.drho[i]) / field_scale(dHlp.drho));
    }
  }
  rows.push_back({"fd_dH_drho", e_rho, 1e-6});
  rows.push_back({"fd_dH_du", e_u, 1e-6});
  rows.push_back({"fd_dH_ds", e_s, 1e-6});
  rows.push_back({"chain_dH_dM", e_M, 1e-8});
  rows.push_back({"chain_dH_dSigma", e_S, 1e-6});
  rows.push_back({"chain_dH_drho", e_r, 1e-6});
  return rows;
}

}  // namespace sf
