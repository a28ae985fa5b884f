#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "spinfluid/config.hpp"
#include "spinfluid/hydro.hpp"
#include "spinfluid/plasma.hpp"

namespace sf {

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitBreakdown = 2, kExitVerification = 3 };

/// Column unit tags written into CSV headers.
struct UnitTags {
  std::string time = "t_nat";
  std::string length = "x_nat";
  std::string energy = "E_nat";
};

struct InitialSpec {
  std::string type = "gaussian";  ///< gaussian, plane_wave, spin_texture, uniform, random, snapshot
  double sigma = 0.5;
  Vec3 center{0.0, 0.0, 0.0};
  Vec3 k{0.0, 0.0, 0.0};
  double eta = 0.0;
  double phi = 0.0;
  Index3 modes{1, 0, 0};
  int axis = 0;
  int pitch = 1;
  int kmax = 3;
  double contrast = 0.4;
  std::uint64_t seed = 1;
  std::filesystem::path psi1;
  std::filesystem::path psi2;
};

struct IntegratorSpec {
  double dt = 1e-4;
  double t_final = 0.1;
  long long output_every = 10;
  long long snapshot_every = 0;  ///< 0 writes the first and last state only
  int samples = 10;

  long long steps() const;
};

struct VerifySpec {
  int states = 10;
  double compare_tolerance = 1e-3;
  double reconstruct_tolerance = 1e-8;
};

struct Scenario {
  std::string name = "scenario";
  Grid grid;
  PhysParams params;
  FieldConfig fields;
  InitialSpec initial;
  IntegratorSpec integrator;
  HydroOptions hydro;
  VerifySpec verify;
  UnitTags units;
};

/// Defaults of [grid] used when the config does not set them.
struct GridDefaults {
  int dim = 1;
  int n = 128;
  double length = 20.0;
};

/// Reads every key of the single-scenario sections and validates the result.
Scenario load_scenario(const Config& cfg, std::optional<std::uint64_t> seed = std::nullopt,
                       const GridDefaults& grid = {});

SpinorField initial_spinor(const Scenario& sc);

/// Builds the species of [plasma.species.*] over the base scenario, plus the kernel of [plasma.interaction].
PlasmaState load_plasma(const Config& cfg, const Scenario& base, std::optional<std::uint64_t> seed = std::nullopt);

struct RunOptions {
  std::optional<std::filesystem::path> config;
  std::vector<std::string> overrides;
  std::filesystem::path output = "out";
  std::optional<std::uint64_t> seed;
  bool quiet = false;
};

/// Executes one subcommand, writing artifacts under options.output. Returns an ExitCode.
int run(const std::string& subcommand, const RunOptions& options);

/// Command-line entry point.
int run_cli(int argc, char** argv);

}  // namespace sf
