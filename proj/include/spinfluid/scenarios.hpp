#pragma once

#include <cstdint>

#include "spinfluid/madelung.hpp"
#include "spinfluid/random.hpp"

namespace sf {

/// Normalized Gaussian packet of width sigma0 per active axis, spin direction (eta, phi),
/// mean wavenumber k0.
SpinorField gaussian_spinor(const Grid& g, double sigma0, const Vec3& k0 = {0.0, 0.0, 0.0}, double eta = 0.0,
                            double phi = 0.0, const Vec3& center = {0.0, 0.0, 0.0});

/// e^{i k.x} times a fixed spinor, k = 2 pi n / L for integer modes n.
SpinorField plane_wave_spinor(const Grid& g, const Index3& modes, double eta = 0.0, double phi = 0.0);

/// Uniform density with eta fixed and phi winding `pitch` times along `axis`.
SpinorField helix_spinor(const Grid& g, int axis, int pitch, double eta = 1.5707963267948966);

/// Uniform spinor (cos(eta/2), e^{i phi} sin(eta/2)) / sqrt(V).
SpinorField uniform_spinor(const Grid& g, double eta, double phi = 0.0);

/// Positive density with relative modulation `contrast`, spin angle eta kept within
/// pi/2 +- eta_swing and smooth band-limited phases. Unit norm.
SpinorField random_spinor(const Grid& g, std::uint64_t seed, int kmax = 3, double contrast = 0.4,
                          double eta_swing = 1.0, double phase_amplitude = 1.0);

/// Smooth spin texture: rho proportional to 1 + 0.2 cos(2 pi x/Lx) cos(2 pi y/Ly), eta = pi/2 + 1.0 r
/// with |r| <= 1, and band-limited component phases.
SpinorField texture_spinor(const Grid& g, std::uint64_t seed);

/// Random positive density, velocity and unit spin field with unit mass.
HydroState random_hydro_state(const Grid& g, std::uint64_t seed, int kmax = 3, double velocity = 0.5);

/// Two-dimensional state with div(rho s) = 0: rho s_perp = (d_y psi, -d_x psi).
HydroState solenoidal_spin_state(const Grid& g, std::uint64_t seed, int kmax = 3);

/// Random band-limited field normalized to max |f| = 1.
ScalarField unit_random_field(const Grid& g, CounterRng& rng, int kmax);

}  // namespace sf
