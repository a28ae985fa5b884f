#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <vector>

#include "spinfluid/errors.hpp"
#include "spinfluid/random.hpp"
#include "spinfluid/snapshot.hpp"
#include "spinfluid/spectral.hpp"
#include "support.hpp"

using namespace sf;
using test::kPi;
using test::max_diff;

TEST_CASE("grid indexing round trip and coordinates") {
  Grid g(3, {4, 6, 8}, {1.0, 2.0, 4.0});
  CHECK(g.points() == 192);
  for (std::size_t i = 0; i < g.points(); ++i) CHECK(g.flatten(g.unflatten(i)) == i);
  CHECK(g.flatten({1, 2, 3}) == (1 * 6 + 2) * 8 + 3);
  CHECK(g.position(0)[0] == doctest::Approx(-0.5));
  CHECK(g.dx(2) == doctest::Approx(0.5));
  CHECK(g.volume() == doctest::Approx(8.0));
  CHECK(g.cell_volume() * g.points() == doctest::Approx(g.volume()));
  CHECK(Grid::mode(5, 8) == -3);
  CHECK(Grid::mode(4, 8) == 4);
}

TEST_CASE("spectral derivatives of trigonometric polynomials are exact") {
  Grid g = Grid::square(32, 2.0 * kPi);
  auto f = ScalarField::sample(g, [](const Vec3& x) { return std::sin(3 * x[0]) * std::cos(2 * x[1]); });
  auto dfx = ScalarField::sample(g, [](const Vec3& x) { return 3 * std::cos(3 * x[0]) * std::cos(2 * x[1]); });
  auto dfy = ScalarField::sample(g, [](const Vec3& x) { return -2 * std::sin(3 * x[0]) * std::sin(2 * x[1]); });
  auto lap = ScalarField::sample(g, [](const Vec3& x) { return -13 * std::sin(3 * x[0]) * std::cos(2 * x[1]); });
  CHECK(max_diff(derivative(f, 0), dfx) < 1e-12);
  CHECK(max_diff(derivative(f, 1), dfy) < 1e-12);
  CHECK(max_diff(laplacian(f), lap) < 1e-11);
  auto dxy = ScalarField::sample(g, [](const Vec3& x) { return -6 * std::cos(3 * x[0]) * std::sin(2 * x[1]); });
  CHECK(max_diff(Spectrum(f).second_derivative(0, 1), dxy) < 1e-11);
}

TEST_CASE("spectral derivative agrees with a fourth-order finite difference") {
  const int n = 256;
  Grid g = Grid::line(n, 2.0 * kPi);
  CounterRng rng(5);
  ScalarField f = random_bandlimited(g, rng, 3, 1.0);
  ScalarField d = derivative(f, 0);
  const double h = g.dx(0);
  double err = 0.0;
  for (int i = 0; i < n; ++i) {
    auto at = [&](int k) { return f[static_cast<std::size_t>((i + k + n) % n)]; };
    double fd = (-at(2) + 8 * at(1) - 8 * at(-1) + at(-2)) / (12 * h);
    err = std::max(err, std::abs(fd - d[i]));
  }
  CHECK(err < 1e-5 * d.max_abs());
  CHECK(err > 0.0);
}

TEST_CASE("odd derivatives drop the Nyquist mode") {
  Grid g = Grid::line(16, 2.0 * kPi);
  auto f = ScalarField::sample(g, [](const Vec3& x) { return std::cos(8 * x[0]); });
  CHECK(derivative(f, 0).max_abs() < 1e-13);
  CHECK(max_diff(laplacian(f), -64.0 * f) < 1e-10);
}

TEST_CASE("Parseval: spectral and quadrature energies agree") {
  Grid g(3, {8, 10, 12}, {1.0, 2.0, 3.0});
  CounterRng rng(9);
  ScalarField f = random_bandlimited(g, rng, 2, 1.0);
  f += 0.3;
  CHECK(spectral_energy(f) == doctest::Approx(integrate(f * f)).epsilon(1e-13));
}

TEST_CASE("dealiasing removes exactly the modes above N/3") {
  Grid g = Grid::line(24, 2.0 * kPi);
  auto keep = ScalarField::sample(g, [](const Vec3& x) { return std::cos(8 * x[0]) + 0.5; });
  auto drop = ScalarField::sample(g, [](const Vec3& x) { return std::sin(9 * x[0]); });
  CHECK(max_diff(dealias(keep), keep) < 1e-14);
  CHECK(dealias(drop).max_abs() < 1e-14);
}

TEST_CASE("vector calculus identities") {
  Grid g = Grid::cube(12, 2.0 * kPi);
  CounterRng rng(3);
  ScalarField f = random_bandlimited(g, rng, 3, 1.0);
  VectorField3 v(g);
  for (int k = 0; k < 3; ++k) v[k] = random_bandlimited(g, rng, 3, 1.0);
  CHECK(max_diff(curl(gradient(f)), VectorField3(g)) < 1e-12);
  CHECK(divergence(curl(v)).max_abs() < 1e-12);
  CHECK(max_diff(divergence(gradient(f)), laplacian(f)) < 1e-11);
  CHECK(max_diff(gradient(inverse_gradient(gradient(f))), gradient(f)) < 1e-12);
  VectorField3 adv = advective_derivative(v, v);
  for (int k = 0; k < 3; ++k) {
    VectorField3 gk = gradient(v[k]);
    CHECK(max_diff(adv[k], dot(v, gk)) < 1e-12);
  }
}

TEST_CASE("complex transforms invert each other") {
  Grid g = Grid::square(8, 1.0);
  CounterRng rng(4);
  ComplexField c = random_bandlimited_complex(g, rng, 2, 1.0);
  CHECK(max_diff(ifft(g, fft(c)), c) < 1e-14);
}

TEST_CASE("counter RNG reproduces the reference SplitMix64 sequence") {
  CounterRng r(0);
  CHECK(r.next_u64() == 0xe220a8397b1dcdafULL);
  CHECK(r.next_u64() == 0x6e789e6aa1b965f4ULL);
  CHECK(r.next_u64() == 0x06c45d188009454fULL);
  CounterRng a(42, 3), b(42, 3), c(43, 3);
  for (int i = 0; i < 100; ++i) {
    auto x = a.next_u64();
    CHECK(x == b.next_u64());
    CHECK(x != c.next_u64());
  }
  CHECK(a.at(7) == CounterRng(42, 3).at(7));
  CounterRng u(1);
  double lo = 1.0, hi = 0.0;
  for (int i = 0; i < 1000; ++i) {
    double x = u.uniform();
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  CHECK(lo >= 0.0);
  CHECK(hi < 1.0);
  CHECK(hi - lo > 0.99);
}

TEST_CASE("band-limited random fields are deterministic and zero-mean") {
  Grid g = Grid::square(16, 1.0);
  CounterRng a(7), b(7);
  ScalarField f = random_bandlimited(g, a, 3, 1.0);
  ScalarField h = random_bandlimited(g, b, 3, 1.0);
  CHECK(test::bitwise_equal(f, h));
  CHECK(std::abs(f.mean()) < 1e-14);
  CHECK(dealias(f).max_abs() > 0.0);
  CHECK(max_diff(dealias(f), f) < 1e-13);
}

TEST_CASE("snapshot round trip is exact and little-endian") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "spinfluid_snapshot_test";
  fs::create_directories(dir);
  Grid g(2, {4, 6, 1}, {1.5, 2.5, 1.0});
  CounterRng rng(11);
  VectorField3 v(g);
  for (int k = 0; k < 3; ++k) v[k] = random_bandlimited(g, rng, 1, 1.0);
  write_snapshot(dir / "0003.v", "v", 0.125, v, "x/t");
  Snapshot s = read_snapshot(dir / "0003.v");
  CHECK(s.header.grid == g);
  CHECK(s.header.components == 3);
  CHECK(s.header.field == "v");
  CHECK(s.header.time == 0.125);
  CHECK(s.header.units == "x/t");
  CHECK(test::bitwise_equal(snapshot_vector(s), v));
  CHECK(fs::file_size(dir / "0003.v.bin") == g.points() * 3 * sizeof(double));
  std::ifstream in(dir / "0003.v.bin", std::ios::binary);
  unsigned char bytes[8];
  in.read(reinterpret_cast<char*>(bytes), 8);
  std::uint64_t bits = 0;
  for (int i = 7; i >= 0; --i) bits = (bits << 8) | bytes[i];
  double first;
  std::memcpy(&first, &bits, 8);
  CHECK(first == v[0][0]);
  in.read(reinterpret_cast<char*>(bytes), 8);
  bits = 0;
  for (int i = 7; i >= 0; --i) bits = (bits << 8) | bytes[i];
  std::memcpy(&first, &bits, 8);
  CHECK(first == v[1][0]);

  ComplexField c = random_bandlimited_complex(g, rng, 2, 1.0);
  write_snapshot(dir / "c", "psi", 1.0, c);
  CHECK(max_diff(snapshot_complex(read_snapshot(dir / "c")), c) == 0.0);
  CHECK_THROWS_AS(read_snapshot(dir / "missing"), Error);
  fs::remove_all(dir);
}

TEST_CASE("non-finite values are reported with their index") {
  Grid g = Grid::line(8, 1.0);
  ScalarField f(g, 1.0);
  f[5] = std::numeric_limits<double>::quiet_NaN();
  try {
    require_finite(f, "f");
    FAIL("expected NonFiniteError");
  } catch (const NonFiniteError& e) {
    CHECK(e.index() == 5);
  }
  CHECK_THROWS_AS(require_same_grid(g, Grid::line(16, 1.0), "x"), ConfigError);
}
