#include "spinfluid/plasma.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>

#include "spinfluid/errors.hpp"
#include "spinfluid/hamiltonian.hpp"
#include "spinfluid/spectral.hpp"

namespace sf {

namespace {

double dot3(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

Vec3 displacement(const Grid& g, const Index3& n) {
  Vec3 d{0.0, 0.0, 0.0};
  for (int a = 0; a < g.dim(); ++a) d[a] = Grid::mode(n[a], g.size(a)) * g.dx(a);
  return d;
}

double profile(const std::function<double(const Vec3&)>& g, const Vec3& x) { return g ? g(x) : 1.0; }

ScalarField convolve(const ScalarField& f, const ScalarField& kernel) {
  Spectrum F(f), K(kernel);
  for (std::size_t i = 0; i < F.coeffs().size(); ++i) F.coeffs()[i] *= K.coeffs()[i];
  ScalarField out = F.to_field();
  out *= f.grid().cell_volume();
  return out;
}

ScalarField kernel_samples(const Grid& g, const std::function<double(const Vec3&)>& w) {
  ScalarField k(g);
  for (std::size_t i = 0; i < g.points(); ++i) k[i] = w(displacement(g, g.unflatten(i)));
  return k;
}

}  // namespace

void validate_plasma(const PlasmaState& pl) {
  if (pl.species.empty()) throw ConfigError("plasma needs at least one species");
  for (const auto& sp : pl.species) {
    sp.params.validate();
    sp.fields.validate(sp.state.grid());
  }
  const auto& k = pl.kernel;
  if (!std::isfinite(k.J) || !std::isfinite(k.c)) throw ConfigError("plasma.interaction strength must be finite");
  if (k.kind == InteractionKernel::Kind::local) {
    if (!k.w) throw ConfigError("local interaction needs a profile");
    const Grid& g0 = pl.species[0].state.grid();
    for (const auto& sp : pl.species)
      if (sp.state.grid() != g0) throw ConfigError("local interaction needs all species on one grid");
    double scale = 0.0, asym = 0.0;
    for (std::size_t i = 0; i < g0.points(); ++i) {
      Vec3 d = displacement(g0, g0.unflatten(i));
      bool nyquist = false;
      for (int a = 0; a < g0.dim(); ++a)
        if (g0.size(a) % 2 == 0 && g0.unflatten(i)[a] == g0.size(a) / 2) nyquist = true;
      double wp = k.w(d);
      scale = std::max(scale, std::abs(wp));
      if (nyquist) continue;
      asym = std::max(asym, std::abs(wp - k.w({-d[0], -d[1], -d[2]})));
    }
    if (asym > 1e-14 * std::max(scale, 1e-300)) throw ConfigError("interaction kernel is not symmetric");
  }
}

MeanField mean_field_potential(const PlasmaState& pl, std::size_t i) {
  const Species& me = pl.species.at(i);
  const Grid& g = me.state.grid();
  MeanField mf{ScalarField(g), VectorField3(g), VectorField3(g)};
  const auto& k = pl.kernel;
  switch (k.kind) {
    case InteractionKernel::Kind::none:
      break;
    case InteractionKernel::Kind::constant: {
      double acc = 0.0;
      for (std::size_t j = 0; j < pl.species.size(); ++j)
        if (j != i) acc += k.c * pl.species[j].state.mass();
      mf.phi = ScalarField(g, acc);
      break;
    }
    case InteractionKernel::Kind::separable: {
      Vec3 m{0.0, 0.0, 0.0};
      for (std::size_t j = 0; j < pl.species.size(); ++j) {
        if (j == i) continue;
        const HydroState& o = pl.species[j].state;
        ScalarField wgt(o.grid());
        for (std::size_t n = 0; n < wgt.size(); ++n) wgt[n] = o.rho[n] * profile(k.g, o.grid().position(n));
        VectorField3 ms = o.s;
        ms *= wgt;
        Vec3 mj = integrate(ms);
        for (int c = 0; c < 3; ++c) m[c] += mj[c];
      }
      ScalarField gi = ScalarField::sample(g, [&](const Vec3& x) { return profile(k.g, x); });
      VectorField3 gg = gradient(gi);
      for (std::size_t n = 0; n < g.points(); ++n) {
        Vec3 s = me.state.s.at(n);
        Vec3 D{-k.J * gi[n] * m[0], -k.J * gi[n] * m[1], -k.J * gi[n] * m[2]};
        mf.dphi_ds.set(n, D);
        mf.phi[n] = dot3(s, D);
        double sm = -k.J * dot3(s, m);
        mf.grad_phi.set(n, {sm * gg[0][n], sm * gg[1][n], sm * gg[2][n]});
      }
      break;
    }
    case InteractionKernel::Kind::local: {
      ScalarField wk = kernel_samples(g, k.w);
      for (std::size_t j = 0; j < pl.species.size(); ++j) {
        if (j == i) continue;
        const HydroState& o = pl.species[j].state;
        for (int c = 0; c < 3; ++c) {
          ScalarField conv = convolve(o.rho * o.s[c], wk);
          conv *= -k.J;
          mf.dphi_ds[c] += conv;
        }
      }
      std::array<VectorField3, 3> gD{gradient(mf.dphi_ds[0]), gradient(mf.dphi_ds[1]), gradient(mf.dphi_ds[2])};
      for (std::size_t n = 0; n < g.points(); ++n) {
        Vec3 s = me.state.s.at(n);
        mf.phi[n] = dot3(s, mf.dphi_ds.at(n));
        Vec3 gp{};
        for (int a = 0; a < 3; ++a) gp[a] = s[0] * gD[0][a][n] + s[1] * gD[1][a][n] + s[2] * gD[2][a][n];
        mf.grad_phi.set(n, gp);
      }
      break;
    }
  }
  return mf;
}

namespace {

std::vector<ExtraRates> interaction_rates(const PlasmaState& pl) {
  std::vector<ExtraRates> out;
  for (std::size_t i = 0; i < pl.species.size(); ++i) {
    const Species& sp = pl.species[i];
    const Grid& g = sp.state.grid();
    MeanField mf = mean_field_potential(pl, i);
    ExtraRates e{VectorField3(g), VectorField3(g)};
    const double ct = -2.0 / (sp.params.c_g * sp.params.hbar);
    for (std::size_t n = 0; n < g.points(); ++n) {
      Vec3 s = sp.state.s.at(n), D = mf.dphi_ds.at(n);
      e.du.set(n, {-mf.grad_phi[0][n] / sp.params.mass, -mf.grad_phi[1][n] / sp.params.mass,
                   -mf.grad_phi[2][n] / sp.params.mass});
      e.ds.set(n, {ct * (s[1] * D[2] - s[2] * D[1]), ct * (s[2] * D[0] - s[0] * D[2]),
                   ct * (s[0] * D[1] - s[1] * D[0])});
    }
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<AmplitudeRates> plasma_rates(const PlasmaState& shape, const std::vector<AmplitudeState>& y, double t,
                                         const HydroOptions& opts) {
  std::vector<ExtraRates> extra;
  if (shape.kernel.couples()) {
    PlasmaState tmp;
    tmp.kernel = shape.kernel;
    for (std::size_t i = 0; i < y.size(); ++i)
      tmp.species.push_back({shape.species[i].name, from_amplitude(y[i]), shape.species[i].params,
                             shape.species[i].fields});
    extra = interaction_rates(tmp);
  }
  std::vector<AmplitudeRates> r;
  for (std::size_t i = 0; i < y.size(); ++i)
    r.push_back(amplitude_rhs(y[i], shape.species[i].fields, shape.species[i].params, t, opts,
                              extra.empty() ? nullptr : &extra[i]));
  return r;
}

}  // namespace

PlasmaState step_plasma(const PlasmaState& pl, double dt, const HydroOptions& opts, std::vector<StepInfo>* info) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("time step must be positive");
  const std::size_t n = pl.species.size();
  const double t = pl.time;
  std::vector<AmplitudeState> y;
  for (const auto& sp : pl.species) y.push_back(to_amplitude(sp.state));
  auto stage = [&](const std::vector<AmplitudeRates>& k, double h) {
    std::vector<AmplitudeState> z;
    for (std::size_t i = 0; i < n; ++i) z.push_back(axpy(y[i], h, k[i]));
    return z;
  };
  auto k1 = plasma_rates(pl, y, t, opts);
  auto k2 = plasma_rates(pl, stage(k1, dt / 2.0), t + dt / 2.0, opts);
  auto k3 = plasma_rates(pl, stage(k2, dt / 2.0), t + dt / 2.0, opts);
  auto k4 = plasma_rates(pl, stage(k3, dt), t + dt, opts);
  PlasmaState out = pl;
  if (info) info->assign(n, StepInfo{});
  for (std::size_t i = 0; i < n; ++i) {
    rk4_combine(y[i], dt, k1[i], k2[i], k3[i], k4[i]);
    finish_step(y[i], opts, info ? &(*info)[i] : nullptr);
    out.species[i].state = from_amplitude(y[i]);
  }
  out.time = t + dt;
  return out;
}

double total_plasma_energy(const PlasmaState& pl) {
  double e = 0.0;
  for (std::size_t i = 0; i < pl.species.size(); ++i) {
    const Species& sp = pl.species[i];
    e += total_energy(sp.state, sp.fields, sp.params, pl.time);
    if (pl.kernel.couples()) e += 0.5 * integrate(sp.state.rho * mean_field_potential(pl, i).phi);
  }
  return e;
}

double interaction_energy_direct(const PlasmaState& pl) {
  const auto& k = pl.kernel;
  if (!k.couples()) return 0.0;
  double e = 0.0;
  for (std::size_t i = 0; i < pl.species.size(); ++i)
    for (std::size_t j = 0; j < pl.species.size(); ++j) {
      if (i == j) continue;
      const HydroState& a = pl.species[i].state;
      const HydroState& b = pl.species[j].state;
      const Grid& ga = a.grid();
      const Grid& gb = b.grid();
      double acc = 0.0;
      for (std::size_t x = 0; x < ga.points(); ++x) {
        Vec3 xa = ga.position(x), sa = a.s.at(x);
        double gx = k.kind == InteractionKernel::Kind::separable ? profile(k.g, xa) : 1.0;
        Index3 ia = ga.unflatten(x);
        for (std::size_t y = 0; y < gb.points(); ++y) {
          double V;
          if (k.kind == InteractionKernel::Kind::constant) {
            V = k.c;
          } else if (k.kind == InteractionKernel::Kind::separable) {
            V = -k.J * dot3(sa, b.s.at(y)) * gx * profile(k.g, gb.position(y));
          } else {
            Index3 ib = gb.unflatten(y), d{};
            for (int c = 0; c < 3; ++c) d[c] = ((ia[c] - ib[c]) % ga.size(c) + ga.size(c)) % ga.size(c);
            V = -k.J * dot3(sa, b.s.at(y)) * k.w(displacement(ga, d));
          }
          acc += a.rho[x] * b.rho[y] * V;
        }
      }
      e += 0.5 * acc * ga.cell_volume() * gb.cell_volume();
    }
  return e;
}

Vec3 total_spin_moment(const PlasmaState& pl) {
  Vec3 m{0.0, 0.0, 0.0};
  for (const auto& sp : pl.species) {
    VectorField3 rs = sp.state.s;
    rs *= sp.state.rho;
    Vec3 v = integrate(rs);
    for (int c = 0; c < 3; ++c) m[c] += v[c];
  }
  return m;
}

namespace {

std::mutex& fftw_mutex() {
  static std::mutex m;
  return m;
}

/// Complex transforms on the Cartesian product of the active axes of two grids.
class ProductSpace {
 public:
  ProductSpace(const Grid& a, const Grid& b) : ga_(a), gb_(b) {
    for (const Grid* g : {&a, &b})
      for (int ax = 0; ax < g->dim(); ++ax) {
        dims_.push_back(g->size(ax));
        lengths_.push_back(g->length(ax));
      }
    points_ = a.points() * b.points();
    std::vector<fftw_complex> buf(points_);
    std::lock_guard<std::mutex> lock(fftw_mutex());
    fwd_ = fftw_plan_dft(static_cast<int>(dims_.size()), dims_.data(), buf.data(), buf.data(), FFTW_FORWARD,
                         FFTW_ESTIMATE | FFTW_UNALIGNED);
    bwd_ = fftw_plan_dft(static_cast<int>(dims_.size()), dims_.data(), buf.data(), buf.data(), FFTW_BACKWARD,
                         FFTW_ESTIMATE | FFTW_UNALIGNED);
  }
  ~ProductSpace() {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
  }
  ProductSpace(const ProductSpace&) = delete;
  ProductSpace& operator=(const ProductSpace&) = delete;

  int axes() const { return static_cast<int>(dims_.size()); }
  std::size_t points() const { return points_; }

  /// Wavenumber along product axis p of flat product index n, Nyquist zeroed.
  double k(int p, std::size_t n) const {
    std::size_t stride = 1;
    for (int q = axes() - 1; q > p; --q) stride *= static_cast<std::size_t>(dims_[q]);
    int i = static_cast<int>((n / stride) % static_cast<std::size_t>(dims_[p]));
    int N = dims_[p];
    if (N % 2 == 0 && i == N / 2) return 0.0;
    return 2.0 * M_PI * Grid::mode(i, N) / lengths_[p];
  }

  /// All first derivatives of a real product field.
  std::vector<std::vector<double>> gradient(const std::vector<double>& f) const {
    std::vector<cplx> spec(f.begin(), f.end());
    fftw_execute_dft(fwd_, reinterpret_cast<fftw_complex*>(spec.data()), reinterpret_cast<fftw_complex*>(spec.data()));
    std::vector<std::vector<double>> out;
    std::vector<cplx> work(points_);
    for (int p = 0; p < axes(); ++p) {
      for (std::size_t n = 0; n < points_; ++n) work[n] = cplx(0.0, k(p, n)) * spec[n];
      fftw_execute_dft(bwd_, reinterpret_cast<fftw_complex*>(work.data()),
                       reinterpret_cast<fftw_complex*>(work.data()));
      std::vector<double> d(points_);
      for (std::size_t n = 0; n < points_; ++n) d[n] = work[n].real() / static_cast<double>(points_);
      out.push_back(std::move(d));
    }
    return out;
  }

  /// Sum of derivatives of the fields along their matching product axes.
  std::vector<double> divergence(const std::vector<std::vector<double>>& v) const {
    std::vector<cplx> acc(points_, 0.0), spec(points_);
    for (int p = 0; p < axes(); ++p) {
      for (std::size_t n = 0; n < points_; ++n) spec[n] = v[p][n];
      fftw_execute_dft(fwd_, reinterpret_cast<fftw_complex*>(spec.data()),
                       reinterpret_cast<fftw_complex*>(spec.data()));
      for (std::size_t n = 0; n < points_; ++n) acc[n] += cplx(0.0, k(p, n)) * spec[n];
    }
    fftw_execute_dft(bwd_, reinterpret_cast<fftw_complex*>(acc.data()), reinterpret_cast<fftw_complex*>(acc.data()));
    std::vector<double> d(points_);
    for (std::size_t n = 0; n < points_; ++n) d[n] = acc[n].real() / static_cast<double>(points_);
    return d;
  }

 private:
  Grid ga_, gb_;
  std::vector<int> dims_;
  std::vector<double> lengths_;
  std::size_t points_ = 0;
  fftw_plan fwd_ = nullptr;
  fftw_plan bwd_ = nullptr;
};

}  // namespace

ProductReport assemble_product_diagnostics(const PlasmaState& pl, const HydroOptions& opts, std::size_t max_points) {
  if (pl.species.size() != 2) throw ConfigError("product diagnostics need exactly two species");
  const HydroState& A = pl.species[0].state;
  const HydroState& B = pl.species[1].state;
  const Grid& ga = A.grid();
  const Grid& gb = B.grid();
  for (const Grid* g : {&ga, &gb})
    for (int ax = 0; ax < g->dim(); ++ax)
      if (g->size(ax) > 32) throw BudgetError("product diagnostics allow at most 32 points per axis");
  if (ga.points() * gb.points() > max_points)
    throw BudgetError("product grid of " + std::to_string(ga.points() * gb.points()) + " points exceeds the budget");

  // per-species rates with the interaction included
  HydroOptions o = opts;
  o.dealias = false;
  std::vector<AmplitudeState> y{to_amplitude(A), to_amplitude(B)};
  std::vector<AmplitudeRates> rates = plasma_rates(pl, y, pl.time, o);
  std::vector<ScalarField> drho;
  std::vector<VectorField3> force, torque;  // F/m and tau from the per-species equations
  for (int i = 0; i < 2; ++i) {
    const HydroState& st = pl.species[i].state;
    VectorField3 flux = st.u;
    flux *= st.rho;
    ScalarField d = divergence(flux);
    d *= -1.0;
    drho.push_back(d);
    force.push_back(rates[i].du + advective_derivative(st.u, st.u));
    torque.push_back(rates[i].ds + advective_derivative(st.u, st.s));
  }

  ProductSpace ps(ga, gb);
  const std::size_t P = ps.points(), nb = gb.points();
  const int da = ga.dim(), db = gb.dim();
  ProductReport rep;
  rep.points = P;

  std::vector<double> varrho(P), dvar(P);
  for (std::size_t n = 0; n < P; ++n) {
    std::size_t i = n / nb, j = n % nb;
    varrho[n] = A.rho[i] * B.rho[j];
    dvar[n] = drho[0][i] * B.rho[j] + A.rho[i] * drho[1][j];
  }
  double total = 0.0;
  for (double v : varrho) total += v;
  total *= ga.cell_volume() * gb.cell_volume();
  rep.norm_defect = std::abs(total - A.mass() * B.mass());

  // U has components u_1 on the first da axes and u_2 on the next db axes
  auto U = [&](int p, std::size_t n) {
    return p < da ? A.u[p][n / nb] : B.u[p - da][n % nb];
  };
  std::vector<std::vector<double>> flux(da + db, std::vector<double>(P));
  for (int p = 0; p < da + db; ++p)
    for (std::size_t n = 0; n < P; ++n) flux[p][n] = varrho[n] * U(p, n);
  std::vector<double> div = ps.divergence(flux);
  double res = 0.0, scale = 0.0;
  for (std::size_t n = 0; n < P; ++n) {
    res = std::max(res, std::abs(dvar[n] + div[n]));
    scale = std::max(scale, std::abs(dvar[n]));
  }
  rep.continuity_residual = scale > 0.0 ? res / scale : res;

  // block fields of the 3N-dimensional velocity and spin
  auto transport = [&](const std::array<const VectorField3*, 2>& field, const std::array<const VectorField3*, 2>& rate,
                       const std::array<const VectorField3*, 2>& rhs) {
    double r = 0.0, sc = 0.0;
    for (int blk = 0; blk < 2; ++blk)
      for (int c = 0; c < 3; ++c) {
        std::vector<double> f(P);
        for (std::size_t n = 0; n < P; ++n) f[n] = blk == 0 ? (*field[0])[c][n / nb] : (*field[1])[c][n % nb];
        auto grad = ps.gradient(f);
        for (std::size_t n = 0; n < P; ++n) {
          std::size_t loc = blk == 0 ? n / nb : n % nb;
          double adv = 0.0;
          for (int p = 0; p < da + db; ++p) adv += U(p, n) * grad[p][n];
          double lhs = (*rate[blk])[c][loc] + adv;
          double target = (*rhs[blk])[c][loc];
          r = std::max(r, std::abs(lhs - target));
          sc = std::max(sc, std::abs(target));
        }
      }
    return sc > 0.0 ? r / sc : r;
  };
  rep.momentum_residual = transport({&A.u, &B.u}, {&rates[0].du, &rates[1].du}, {&force[0], &force[1]});
  rep.spin_residual = transport({&A.s, &B.s}, {&rates[0].ds, &rates[1].ds}, {&torque[0], &torque[1]});
  return rep;
}

}  // namespace sf
