#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "spinfluid/fields.hpp"

namespace sf {

/// Header of a binary field snapshot. Values are little-endian float64,
/// point-major in row-major grid order with the component index fastest.
struct SnapshotHeader {
  Grid grid;
  std::string field;
  int components = 1;
  double time = 0.0;
  std::string units;
};

struct Snapshot {
  SnapshotHeader header;
  std::vector<double> values;
};

/// Writes `<base>.bin` and `<base>.hdr`.
void write_snapshot(const std::filesystem::path& base, const SnapshotHeader& h, const std::vector<double>& values);
void write_snapshot(const std::filesystem::path& base, const std::string& field, double time, const ScalarField& f,
                    const std::string& units = "");
void write_snapshot(const std::filesystem::path& base, const std::string& field, double time, const VectorField3& f,
                    const std::string& units = "");
/// Complex fields are stored as two components (real, imaginary).
void write_snapshot(const std::filesystem::path& base, const std::string& field, double time, const ComplexField& f,
                    const std::string& units = "");

Snapshot read_snapshot(const std::filesystem::path& base);
ScalarField snapshot_scalar(const Snapshot& s);
VectorField3 snapshot_vector(const Snapshot& s);
ComplexField snapshot_complex(const Snapshot& s);

}  // namespace sf
