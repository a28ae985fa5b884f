#include "spinfluid/random.hpp"

#include <cmath>
#include <numbers>

namespace sf {

std::uint64_t CounterRng::mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t CounterRng::at(std::uint64_t counter) const {
  return mix(mix(seed_ ^ stream_) + 0x9e3779b97f4a7c15ULL * (counter + 1));
}

namespace {

template <class Emit>
void for_each_mode(const Grid& g, int kmax, Emit emit) {
  int lim[3] = {0, 0, 0};
  for (int a = 0; a < g.dim(); ++a) lim[a] = kmax;
  for (int n0 = -lim[0]; n0 <= lim[0]; ++n0)
    for (int n1 = -lim[1]; n1 <= lim[1]; ++n1)
      for (int n2 = -lim[2]; n2 <= lim[2]; ++n2) {
        if (n0 == 0 && n1 == 0 && n2 == 0) continue;
        emit(n0, n1, n2);
      }
}

}  // namespace

ScalarField random_bandlimited(const Grid& g, CounterRng& rng, int kmax, double amplitude) {
  ScalarField f(g);
  const double two_pi = 2.0 * std::numbers::pi;
  for_each_mode(g, kmax, [&](int n0, int n1, int n2) {
    double a = rng.uniform(-1.0, 1.0);
    double b = rng.uniform(-1.0, 1.0);
    double scale = amplitude / (1.0 + n0 * n0 + n1 * n1 + n2 * n2);
    double k[3] = {two_pi * n0 / g.length(0), two_pi * n1 / g.length(1), two_pi * n2 / g.length(2)};
    for (std::size_t i = 0; i < g.points(); ++i) {
      Vec3 x = g.position(i);
      double ph = k[0] * x[0] + k[1] * x[1] + k[2] * x[2];
      f[i] += scale * (a * std::cos(ph) + b * std::sin(ph));
    }
  });
  return f;
}

ComplexField random_bandlimited_complex(const Grid& g, CounterRng& rng, int kmax, double amplitude) {
  ScalarField re = random_bandlimited(g, rng, kmax, amplitude);
  ScalarField im = random_bandlimited(g, rng, kmax, amplitude);
  ComplexField z(g);
  for (std::size_t i = 0; i < g.points(); ++i) z[i] = cplx(re[i], im[i]);
  return z;
}

}  // namespace sf
