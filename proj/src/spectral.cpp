#include "spinfluid/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

#include "spinfluid/errors.hpp"

namespace sf {

namespace detail {

struct Layout {
  int rank = 0;
  int n[3] = {1, 1, 1};
  std::size_t real_points = 0;
  std::size_t half_points = 0;
  // per half-complex index
  std::vector<double> k[3];       // plain wavenumber, Nyquist kept
  std::vector<double> k_odd[3];   // Nyquist zeroed
  std::vector<double> k2;
  std::vector<unsigned char> keep;  // 2/3 rule
  std::vector<double> weight;       // Parseval multiplicity
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
  fftw_plan c2c_fwd = nullptr;
  fftw_plan c2c_bwd = nullptr;
};

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

using Key = std::tuple<int, int, int, int, double, double, double>;

std::shared_ptr<const Layout> build(const Grid& g) {
  auto L = std::make_shared<Layout>();
  L->rank = g.dim();
  for (int a = 0; a < g.dim(); ++a) L->n[a] = g.size(a);
  L->real_points = g.points();
  int last = g.dim() - 1;
  int nh = g.size(last) / 2 + 1;
  std::size_t outer = g.points() / g.size(last);
  L->half_points = outer * nh;
  for (int a = 0; a < 3; ++a) {
    L->k[a].assign(L->half_points, 0.0);
    L->k_odd[a].assign(L->half_points, 0.0);
  }
  L->k2.assign(L->half_points, 0.0);
  L->keep.assign(L->half_points, 1);
  L->weight.assign(L->half_points, 1.0);

  int sz[3] = {1, 1, 1};
  for (int a = 0; a < g.dim(); ++a) sz[a] = g.size(a);
  sz[last] = nh;
  for (std::size_t c = 0; c < L->half_points; ++c) {
    int idx[3] = {0, 0, 0};
    std::size_t r = c;
    for (int a = g.dim() - 1; a >= 0; --a) {
      idx[a] = static_cast<int>(r % sz[a]);
      r /= sz[a];
    }
    double k2 = 0.0;
    for (int a = 0; a < g.dim(); ++a) {
      int n = g.size(a);
      int m = (a == last) ? idx[a] : Grid::mode(idx[a], n);
      double base = 2.0 * std::numbers::pi / g.length(a);
      double kv = base * m;
      L->k[a][c] = kv;
      bool nyq = (n % 2 == 0) && (std::abs(m) == n / 2);
      L->k_odd[a][c] = nyq ? 0.0 : kv;
      k2 += kv * kv;
      if (3 * std::abs(m) > n) L->keep[c] = 0;
    }
    L->k2[c] = k2;
    int nl = g.size(last);
    bool self_conjugate = idx[last] == 0 || (nl % 2 == 0 && idx[last] == nl / 2);
    L->weight[c] = self_conjugate ? 1.0 : 2.0;
  }

  std::vector<double> rbuf(L->real_points);
  std::vector<fftw_complex> cbuf(L->half_points);
  std::vector<fftw_complex> fbuf(L->real_points), gbuf(L->real_points);
  unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  L->r2c = fftw_plan_dft_r2c(L->rank, L->n, rbuf.data(), cbuf.data(), flags);
  L->c2r = fftw_plan_dft_c2r(L->rank, L->n, cbuf.data(), rbuf.data(), flags);
  L->c2c_fwd = fftw_plan_dft(L->rank, L->n, fbuf.data(), gbuf.data(), FFTW_FORWARD, flags);
  L->c2c_bwd = fftw_plan_dft(L->rank, L->n, fbuf.data(), gbuf.data(), FFTW_BACKWARD, flags);
  if (!L->r2c || !L->c2r || !L->c2c_fwd || !L->c2c_bwd) throw Error("FFT planning failed");
  return L;
}

}  // namespace

// Layouts are kept for the process lifetime; plans are never destroyed.
std::shared_ptr<const Layout> layout_for(const Grid& g) {
  static std::map<Key, std::shared_ptr<const Layout>> cache;
  Key key{g.dim(), g.size(0), g.size(1), g.size(2), g.length(0), g.length(1), g.length(2)};
  std::lock_guard<std::mutex> lock(planner_mutex());
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto L = build(g);
  cache.emplace(key, L);
  return L;
}

}  // namespace detail

using detail::Layout;

Spectrum::Spectrum(const ScalarField& f) : grid_(f.grid()), layout_(detail::layout_for(f.grid())) {
  require_finite(f, "spectral transform input");
  c_.resize(layout_->half_points);
  std::vector<double> in(f.values());
  fftw_execute_dft_r2c(layout_->r2c, in.data(), reinterpret_cast<fftw_complex*>(c_.data()));
}

Spectrum::Spectrum(const Grid& g, std::shared_ptr<const Layout> layout, std::vector<cplx> c)
    : grid_(g), layout_(std::move(layout)), c_(std::move(c)) {}

ScalarField Spectrum::inverse(std::vector<cplx> c) const {
  ScalarField out(grid_);
  fftw_execute_dft_c2r(layout_->c2r, reinterpret_cast<fftw_complex*>(c.data()), out.data());
  double inv = 1.0 / static_cast<double>(layout_->real_points);
  for (double& x : out.values()) x *= inv;
  return out;
}

ScalarField Spectrum::to_field() const { return inverse(c_); }

ScalarField Spectrum::derivative(int axis) const {
  if (axis >= grid_.dim()) return ScalarField(grid_);
  std::vector<cplx> c(c_.size());
  const auto& k = layout_->k_odd[axis];
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = cplx(0.0, k[i]) * c_[i];
  return inverse(std::move(c));
}

ScalarField Spectrum::second_derivative(int a, int b) const {
  if (a >= grid_.dim() || b >= grid_.dim()) return ScalarField(grid_);
  std::vector<cplx> c(c_.size());
  if (a == b) {
    const auto& k = layout_->k[a];
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = -k[i] * k[i] * c_[i];
  } else {
    const auto& ka = layout_->k_odd[a];
    const auto& kb = layout_->k_odd[b];
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = -ka[i] * kb[i] * c_[i];
  }
  return inverse(std::move(c));
}

ScalarField Spectrum::laplacian() const {
  std::vector<cplx> c(c_.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = -layout_->k2[i] * c_[i];
  return inverse(std::move(c));
}

Spectrum& Spectrum::dealias() {
  for (std::size_t i = 0; i < c_.size(); ++i)
    if (!layout_->keep[i]) c_[i] = 0.0;
  return *this;
}

double Spectrum::energy() const {
  double s = 0.0;
  for (std::size_t i = 0; i < c_.size(); ++i) s += layout_->weight[i] * std::norm(c_[i]);
  double n = static_cast<double>(layout_->real_points);
  return s * grid_.cell_volume() / n;
}

ScalarField derivative(const ScalarField& f, int axis) { return Spectrum(f).derivative(axis); }

VectorField3 gradient(const ScalarField& f) {
  Spectrum s(f);
  VectorField3 out(f.grid());
  for (int a = 0; a < f.grid().dim(); ++a) out[a] = s.derivative(a);
  return out;
}

ScalarField divergence(const VectorField3& v) {
  const Grid& g = v.grid();
  auto L = detail::layout_for(g);
  std::vector<cplx> acc(L->half_points, 0.0);
  for (int a = 0; a < g.dim(); ++a) {
    Spectrum s(v[a]);
    const auto& k = L->k_odd[a];
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += cplx(0.0, k[i]) * s.coeffs()[i];
  }
  ScalarField out(g);
  fftw_execute_dft_c2r(L->c2r, reinterpret_cast<fftw_complex*>(acc.data()), out.data());
  out *= 1.0 / static_cast<double>(L->real_points);
  return out;
}

ScalarField laplacian(const ScalarField& f) { return Spectrum(f).laplacian(); }

VectorField3 laplacian(const VectorField3& v) {
  VectorField3 out(v.grid());
  for (int k = 0; k < 3; ++k) out[k] = laplacian(v[k]);
  return out;
}

VectorField3 curl(const VectorField3& v) {
  const Grid& g = v.grid();
  // d[c][a] = d v_c / d x_a
  std::array<std::array<ScalarField, 3>, 3> d;
  for (int c = 0; c < 3; ++c) {
    Spectrum s(v[c]);
    for (int a = 0; a < 3; ++a) d[c][a] = (a < g.dim()) ? s.derivative(a) : ScalarField(g);
  }
  VectorField3 out(g);
  out[0] = d[2][1] - d[1][2];
  out[1] = d[0][2] - d[2][0];
  out[2] = d[1][0] - d[0][1];
  return out;
}

VectorField3 advective_derivative(const VectorField3& a, const VectorField3& v) {
  const Grid& g = v.grid();
  VectorField3 out(g);
  for (int c = 0; c < 3; ++c) {
    Spectrum s(v[c]);
    for (int ax = 0; ax < g.dim(); ++ax) out[c] += a[ax] * s.derivative(ax);
  }
  return out;
}

ScalarField inverse_gradient(const VectorField3& v) {
  const Grid& g = v.grid();
  auto L = detail::layout_for(g);
  std::vector<cplx> acc(L->half_points, 0.0);
  for (int a = 0; a < g.dim(); ++a) {
    Spectrum s(v[a]);
    const auto& k = L->k_odd[a];
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += cplx(0.0, -k[i]) * s.coeffs()[i];
  }
  for (std::size_t i = 0; i < acc.size(); ++i) {
    double kk = 0.0;
    for (int a = 0; a < g.dim(); ++a) kk += L->k_odd[a][i] * L->k_odd[a][i];
    acc[i] = kk > 0.0 ? acc[i] / kk : 0.0;
  }
  ScalarField out(g);
  fftw_execute_dft_c2r(L->c2r, reinterpret_cast<fftw_complex*>(acc.data()), out.data());
  out *= 1.0 / static_cast<double>(L->real_points);
  return out;
}

ScalarField dealias(const ScalarField& f) {
  Spectrum s(f);
  s.dealias();
  return s.to_field();
}

VectorField3 dealias(const VectorField3& v) {
  VectorField3 out(v.grid());
  for (int k = 0; k < 3; ++k) out[k] = dealias(v[k]);
  return out;
}

double integrate(const ScalarField& f) {
  require_finite(f, "integrand");
  double s = 0.0;
  for (double x : f.values()) s += x;
  return s * f.grid().cell_volume();
}

Vec3 integrate(const VectorField3& v) { return {integrate(v[0]), integrate(v[1]), integrate(v[2])}; }

double spectral_energy(const ScalarField& f) { return Spectrum(f).energy(); }

std::vector<cplx> fft(const ComplexField& f) {
  require_finite(f, "complex transform input");
  auto L = detail::layout_for(f.grid());
  std::vector<cplx> in(f.values());
  std::vector<cplx> out(in.size());
  fftw_execute_dft(L->c2c_fwd, reinterpret_cast<fftw_complex*>(in.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

ComplexField ifft(const Grid& g, std::vector<cplx> spectrum) {
  auto L = detail::layout_for(g);
  ComplexField out(g);
  fftw_execute_dft(L->c2c_bwd, reinterpret_cast<fftw_complex*>(spectrum.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));
  out *= cplx(1.0 / static_cast<double>(L->real_points), 0.0);
  return out;
}

std::vector<double> full_wavenumbers(const Grid& g, int axis, bool odd) {
  std::vector<double> k(g.points(), 0.0);
  if (axis >= g.dim()) return k;
  std::vector<double> k1 = g.wavenumbers(axis);
  int n = g.size(axis);
  if (odd && n % 2 == 0) k1[n / 2] = 0.0;
  for (std::size_t i = 0; i < g.points(); ++i) k[i] = k1[g.unflatten(i)[axis]];
  return k;
}

}  // namespace sf
