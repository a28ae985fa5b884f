#include "spinfluid/hydro.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "spinfluid/errors.hpp"
#include "spinfluid/pauli.hpp"
#include "spinfluid/spectral.hpp"

namespace sf {

AmplitudeState to_amplitude(const HydroState& st) {
  AmplitudeState out{ScalarField(st.grid()), st.u, st.s};
  for (std::size_t i = 0; i < st.rho.size(); ++i) out.a[i] = std::sqrt(std::max(st.rho[i], 0.0));
  return out;
}

HydroState from_amplitude(const AmplitudeState& st) { return HydroState{st.a * st.a, st.u, st.s}; }

ScalarField vacuum_weight(const ScalarField& rho, const HydroOptions& opts) {
  ScalarField w(rho.grid(), 1.0);
  const double rmax = rho.max();
  if (!(rmax > 0.0)) throw VacuumError("density vanishes everywhere", {});
  const double llo = std::log(opts.mask_lo), lhi = std::log(opts.mask_hi);
  for (std::size_t i = 0; i < rho.size(); ++i) {
    double r = rho[i] / rmax;
    if (r >= opts.mask_hi) continue;
    if (!(r > opts.mask_lo)) {
      w[i] = 0.0;
      continue;
    }
    double z = (std::log(r) - llo) / (lhi - llo);
    w[i] = z * z * (3.0 - 2.0 * z);
  }
  return w;
}

std::size_t fill_vacuum(HydroState& st, const HydroOptions& opts) {
  ScalarField w = vacuum_weight(st.rho, opts);
  Vec3 mu{}, ms{};
  double m = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] == 0.0) {
      ++count;
      continue;
    }
    m += st.rho[i];
    for (int c = 0; c < 3; ++c) {
      mu[c] += st.rho[i] * st.u[c][i];
      ms[c] += st.rho[i] * st.s[c][i];
    }
  }
  if (count == 0) return 0;
  double ns = std::sqrt(ms[0] * ms[0] + ms[1] * ms[1] + ms[2] * ms[2]);
  for (int c = 0; c < 3; ++c) {
    mu[c] /= m;
    ms[c] = ns > 0.0 ? ms[c] / ns : (c == 2 ? 1.0 : 0.0);
  }
  for (std::size_t i = 0; i < w.size(); ++i)
    if (w[i] == 0.0) {
      st.u.set(i, mu);
      st.s.set(i, ms);
    }
  return count;
}

AmplitudeRates amplitude_rhs(const AmplitudeState& st, const FieldConfig& f, const PhysParams& p, double t,
                             const HydroOptions& opts, const ExtraRates* extra) {
  (void)t;
  const Grid& g = st.a.grid();
  const std::size_t n = g.points();
  const double hb = p.hbar, m = p.mass, q = p.charge;
  const ScalarField& a = st.a;
  const VectorField3& u = st.u;
  const VectorField3& s = st.s;

  ScalarField rho = a * a;
  ScalarField w = vacuum_weight(rho, opts);

  VectorField3 ga = gradient(a);
  ScalarField la = laplacian(a);
  VectorField3 gla = gradient(la);
  std::array<VectorField3, 3> gu{gradient(u[0]), gradient(u[1]), gradient(u[2])};
  std::array<VectorField3, 3> gs{gradient(s[0]), gradient(s[1]), gradient(s[2])};
  ScalarField divu = divergence(u);

  const bool spin_terms = s.max_abs() > 0.0;
  VectorField3 ls = laplacian(s);
  ScalarField gs2(g);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int k = 0; k < 3; ++k)
      for (int j = 0; j < 3; ++j) acc += gs[k][j][i] * gs[k][j][i];
    gs2[i] = acc;
  }
  VectorField3 ggs2 = gradient(gs2);

  VectorField3 E = f.E(g);
  const bool hasB = !f.b.empty();
  std::array<VectorField3, 3> gB;
  if (hasB)
    for (int k = 0; k < 3; ++k) gB[k] = gradient(f.b[k]);
  VectorField3 gV;
  if (!p.V.empty()) gV = gradient(p.V);

  const double cq = p.c_g * p.c_g / m;                          // times grad Q
  const double cQ = -hb * hb / (2.0 * m);                       // Q prefactor
  const double csg = p.c_g * p.kappa_s * q * hb / (2.0 * m * m);  // Stern-Gerlach
  const double cpi = p.c_g * p.c_g * hb * hb / (4.0 * m * m);   // spin stress
  const double cprec = p.kappa_s * q / m;
  const double cten = p.c_g * hb / (2.0 * m);

  AmplitudeRates r{ScalarField(g), VectorField3(g), VectorField3(g)};
  for (std::size_t i = 0; i < n; ++i) {
    Vec3 ui = u.at(i);
    r.da[i] = -(ui[0] * ga[0][i] + ui[1] * ga[1][i] + ui[2] * ga[2][i]) - 0.5 * a[i] * divu[i];
    if (w[i] == 0.0) continue;
    const double ai = a[i];
    Vec3 l{2.0 * ga[0][i] / ai, 2.0 * ga[1][i] / ai, 2.0 * ga[2][i] / ai};  // grad log rho
    Vec3 du{}, ds{};
    for (int c = 0; c < 3; ++c) {
      double adv = ui[0] * gu[c][0][i] + ui[1] * gu[c][1][i] + ui[2] * gu[c][2][i];
      double gQ = cQ * (gla[c][i] / ai - la[i] * ga[c][i] / (ai * ai));
      du[c] = -adv + q * E[c][i] / m - cq * gQ;
      if (!p.V.empty()) du[c] -= gV[c][i] / m;
      if (p.pressure.active()) du[c] -= p.pressure.d2h(rho[i]) * 2.0 * ai * ga[c][i] / m;
    }
    if (hasB) {
      Vec3 B = f.b.at(i);
      if (f.lorentz_coupling) {
        du[0] += q / m * (ui[1] * B[2] - ui[2] * B[1]);
        du[1] += q / m * (ui[2] * B[0] - ui[0] * B[2]);
        du[2] += q / m * (ui[0] * B[1] - ui[1] * B[0]);
      }
      for (int c = 0; c < 3; ++c)
        du[c] += csg * (s[0][i] * gB[0][c][i] + s[1][i] * gB[1][c][i] + s[2][i] * gB[2][c][i]);
    }
    Vec3 si = s.at(i);
    if (spin_terms) {
      for (int c = 0; c < 3; ++c) {
        // (1/rho) d_j T_cj with T_cj = d_c s . d_j s
        double lt = 0.0, divT = 0.5 * ggs2[c][i];
        for (int j = 0; j < 3; ++j) {
          double T = gs[0][c][i] * gs[0][j][i] + gs[1][c][i] * gs[1][j][i] + gs[2][c][i] * gs[2][j][i];
          lt += l[j] * T;
        }
        divT += gs[0][c][i] * ls[0][i] + gs[1][c][i] * ls[1][i] + gs[2][c][i] * ls[2][i];
        du[c] -= cpi * (lt + divT);
      }
      Vec3 X{};
      for (int k = 0; k < 3; ++k) {
        ds[k] = -(ui[0] * gs[k][0][i] + ui[1] * gs[k][1][i] + ui[2] * gs[k][2][i]);
        X[k] = ls[k][i] + l[0] * gs[k][0][i] + l[1] * gs[k][1][i] + l[2] * gs[k][2][i];
      }
      ds[0] += cten * (si[1] * X[2] - si[2] * X[1]);
      ds[1] += cten * (si[2] * X[0] - si[0] * X[2]);
      ds[2] += cten * (si[0] * X[1] - si[1] * X[0]);
      if (hasB) {
        Vec3 B = f.b.at(i);
        ds[0] += cprec * (si[1] * B[2] - si[2] * B[1]);
        ds[1] += cprec * (si[2] * B[0] - si[0] * B[2]);
        ds[2] += cprec * (si[0] * B[1] - si[1] * B[0]);
      }
    }
    if (extra) {
      for (int c = 0; c < 3; ++c) {
        if (!extra->du.empty()) du[c] += extra->du[c][i];
        if (!extra->ds.empty()) ds[c] += extra->ds[c][i];
      }
    }
    for (int c = 0; c < 3; ++c) {
      r.du[c][i] = w[i] * du[c];
      r.ds[c][i] = w[i] * ds[c];
    }
  }
  if (opts.dealias) {
    r.da = dealias(r.da);
    r.du = dealias(r.du);
    r.ds = dealias(r.ds);
  }
  return r;
}

HydroRates hydro_rhs(const HydroState& st, const FieldConfig& f, const PhysParams& p, double t, bool dealias_out,
                     const HydroOptions& opts) {
  f.validate(st.grid());
  require_finite(st.rho, "rho");
  require_finite(st.u, "u");
  require_finite(st.s, "s");
  if (st.s.max_abs() > 0.0 && st.spin_norm_defect() > opts.spin_drift_limit)
    throw InvariantError("spin field is not of unit length");
  HydroOptions o = opts;
  o.dealias = false;
  AmplitudeRates ar = amplitude_rhs(to_amplitude(st), f, p, t, o);
  VectorField3 flux = st.u;
  flux *= st.rho;
  HydroRates r{divergence(flux), std::move(ar.du), std::move(ar.ds)};
  r.drho *= -1.0;
  if (dealias_out) {
    r.drho = dealias(r.drho);
    r.du = dealias(r.du);
    r.ds = dealias(r.ds);
  }
  return r;
}

AmplitudeState axpy(const AmplitudeState& x, double h, const AmplitudeRates& k) {
  AmplitudeState y = x;
  for (std::size_t i = 0; i < y.a.size(); ++i) y.a[i] += h * k.da[i];
  for (int c = 0; c < 3; ++c)
    for (std::size_t i = 0; i < y.a.size(); ++i) {
      y.u[c][i] += h * k.du[c][i];
      y.s[c][i] += h * k.ds[c][i];
    }
  return y;
}

void finish_step(AmplitudeState& st, const HydroOptions& opts, StepInfo* info) {
  require_finite(st.a, "rho");
  require_finite(st.u, "u");
  require_finite(st.s, "s");
  StepInfo loc;
  if (st.s.max_abs() > 0.0) {
    for (std::size_t i = 0; i < st.s.size(); ++i) {
      Vec3 v = st.s.at(i);
      double nv = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
      loc.spin_drift = std::max(loc.spin_drift, std::abs(nv - 1.0));
      if (opts.renormalize_spin && nv > 0.0) {
        loc.projection_change = std::max(loc.projection_change, std::abs(nv - 1.0));
        st.s.set(i, {v[0] / nv, v[1] / nv, v[2] / nv});
      }
    }
    if (loc.spin_drift > opts.spin_drift_limit)
      throw InvariantError(fmt::format("spin length drifted by {:.3e} in one step", loc.spin_drift));
  }
  if (info) *info = loc;
}

void rk4_combine(AmplitudeState& st, double dt, const AmplitudeRates& k1, const AmplitudeRates& k2,
                 const AmplitudeRates& k3, const AmplitudeRates& k4) {
  const std::size_t n = st.a.size();
  for (std::size_t i = 0; i < n; ++i)
    st.a[i] += dt / 6.0 * (k1.da[i] + 2.0 * k2.da[i] + 2.0 * k3.da[i] + k4.da[i]);
  for (int c = 0; c < 3; ++c)
    for (std::size_t i = 0; i < n; ++i) {
      st.u[c][i] += dt / 6.0 * (k1.du[c][i] + 2.0 * k2.du[c][i] + 2.0 * k3.du[c][i] + k4.du[c][i]);
      st.s[c][i] += dt / 6.0 * (k1.ds[c][i] + 2.0 * k2.ds[c][i] + 2.0 * k3.ds[c][i] + k4.ds[c][i]);
    }
}

void step_amplitude(AmplitudeState& st, const FieldConfig& f, const PhysParams& p, double t, double dt,
                    const HydroOptions& opts, StepInfo* info) {
  f.validate(st.a.grid());
  AmplitudeRates k1 = amplitude_rhs(st, f, p, t, opts);
  AmplitudeRates k2 = amplitude_rhs(axpy(st, dt / 2.0, k1), f, p, t + dt / 2.0, opts);
  AmplitudeRates k3 = amplitude_rhs(axpy(st, dt / 2.0, k2), f, p, t + dt / 2.0, opts);
  AmplitudeRates k4 = amplitude_rhs(axpy(st, dt, k3), f, p, t + dt, opts);
  rk4_combine(st, dt, k1, k2, k3, k4);
  finish_step(st, opts, info);
}

HydroState step_hydro(const HydroState& state, const FieldConfig& f, const PhysParams& p, double t, double dt,
                      const HydroOptions& opts, StepInfo* info) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("time step must be positive");
  AmplitudeState st = to_amplitude(state);
  step_amplitude(st, f, p, t, dt, opts, info);
  return from_amplitude(st);
}

BreakdownMonitor::BreakdownMonitor(const ScalarField& rho0, const PhysParams& p, const HydroOptions& opts)
    : floor_(p.rho_floor_rel * rho0.mean()), baseline_(0) {
  for (std::size_t i = 0; i < rho0.size(); ++i)
    if (!(rho0[i] > floor_)) ++baseline_;
  allowed_ = static_cast<std::size_t>(opts.floor_growth_limit * static_cast<double>(rho0.size()));
}

void BreakdownMonitor::check(const ScalarField& rho) const {
  std::vector<std::size_t> below;
  for (std::size_t i = 0; i < rho.size(); ++i)
    if (!(rho[i] > floor_)) below.push_back(i);
  if (below.size() > baseline_ + allowed_)
    throw VacuumError("density fell below the floor at " + std::to_string(below.size() - baseline_) +
                          " additional points",
                      std::move(below));
}

double ErrorReport::max_rho() const {
  double m = 0.0;
  for (const auto& r : rows) m = std::max(m, r.rho);
  return m;
}
double ErrorReport::max_u() const {
  double m = 0.0;
  for (const auto& r : rows) m = std::max(m, r.u);
  return m;
}
double ErrorReport::max_s() const {
  double m = 0.0;
  for (const auto& r : rows) m = std::max(m, r.s);
  return m;
}

namespace {

double weighted_rel(const ScalarField& rho, const VectorField3& ref, const VectorField3& test) {
  double num = 0.0, den = 0.0, wsum = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    for (int c = 0; c < 3; ++c) {
      double d = test[c][i] - ref[c][i];
      num += rho[i] * d * d;
      den += rho[i] * ref[c][i] * ref[c][i];
    }
    wsum += rho[i];
  }
  return std::sqrt(num / std::max(den, 1e-20 * wsum));
}

}  // namespace

ErrorRow state_error(const HydroState& ref, const HydroState& test) {
  ErrorRow r;
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < ref.rho.size(); ++i) {
    double d = test.rho[i] - ref.rho[i];
    num += d * d;
    den += ref.rho[i] * ref.rho[i];
  }
  r.rho = std::sqrt(num / den);
  r.u = weighted_rel(ref.rho, ref.u, test.u);
  r.s = weighted_rel(ref.rho, ref.s, test.s);
  return r;
}

ErrorReport correspondence_error(const SpinorField& psi0, const FieldConfig& f, const PhysParams& p, double t_final,
                                 double dt, const HydroOptions& opts, int samples) {
  f.validate(psi0.grid());
  if (!(dt > 0.0) || !(t_final > 0.0)) throw ConfigError("time step and horizon must be positive");
  const long steps = std::lround(t_final / dt);
  if (steps < 1 || std::abs(steps * dt - t_final) > 1e-9 * t_final)
    throw ConfigError("horizon must be an integer number of time steps");
  samples = std::clamp(samples, 1, static_cast<int>(steps));

  ErrorReport rep;
  SpinorField psi = psi0;
  HydroState h0 = forward_transform(psi0, f.A(0.0), p, VacuumPolicy::permit);
  fill_vacuum(h0, opts);
  AmplitudeState hs = to_amplitude(h0);
  BreakdownMonitor mon(h0.rho, p, opts);
  auto record = [&](double t) {
    HydroState ref = forward_transform(psi, f.A(t), p, VacuumPolicy::permit);
    ErrorRow r = state_error(ref, from_amplitude(hs));
    r.time = t;
    rep.rows.push_back(r);
  };
  record(0.0);
  double t = 0.0;
  try {
    for (long k = 1; k <= steps; ++k) {
      psi = step_pauli(psi, f, p, t, dt);
      step_amplitude(hs, f, p, t, dt, opts);
      t = k * dt;
      mon.check(hs.a * hs.a);
      if (k * samples % steps == 0 || k == steps) record(t);
    }
  } catch (const Error& e) {
    rep.complete = false;
    rep.breakdown_time = t;
    rep.failure = e.what();
  }
  return rep;
}

}  // namespace sf
