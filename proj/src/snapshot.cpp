#include "spinfluid/snapshot.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "spinfluid/errors.hpp"

namespace sf {

namespace {

std::filesystem::path with_ext(const std::filesystem::path& base, const char* ext) {
  std::filesystem::path p = base;
  p += ext;
  return p;
}

std::uint64_t to_le(std::uint64_t x) {
  if constexpr (std::endian::native == std::endian::little) return x;
  std::uint64_t y = 0;
  for (int i = 0; i < 8; ++i) y |= ((x >> (8 * i)) & 0xffu) << (8 * (7 - i));
  return y;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

}  // namespace

void write_snapshot(const std::filesystem::path& base, const SnapshotHeader& h, const std::vector<double>& values) {
  if (values.size() != h.grid.points() * static_cast<std::size_t>(h.components))
    throw Error("snapshot size mismatch for field " + h.field);
  std::filesystem::create_directories(base.parent_path().empty() ? "." : base.parent_path());
  {
    std::ofstream bin(with_ext(base, ".bin"), std::ios::binary);
    if (!bin) throw Error("cannot open snapshot file " + with_ext(base, ".bin").string());
    for (double v : values) {
      std::uint64_t bits;
      std::memcpy(&bits, &v, 8);
      bits = to_le(bits);
      bin.write(reinterpret_cast<const char*>(&bits), 8);
    }
  }
  std::ofstream hdr(with_ext(base, ".hdr"));
  if (!hdr) throw Error("cannot open snapshot header " + with_ext(base, ".hdr").string());
  const Grid& g = h.grid;
  std::string sizes, lengths;
  for (int a = 0; a < g.dim(); ++a) {
    sizes += (a ? " " : "") + std::to_string(g.size(a));
    lengths += (a ? " " : "") + fmt::format("{:.17g}", g.length(a));
  }
  hdr << "dim = " << g.dim() << "\n"
      << "sizes = " << sizes << "\n"
      << "lengths = " << lengths << "\n"
      << "field = " << h.field << "\n"
      << "components = " << h.components << "\n"
      << "time = " << fmt::format("{:.17g}", h.time) << "\n"
      << "units = " << h.units << "\n"
      << "encoding = float64 little-endian, row-major, component fastest\n";
}

void write_snapshot(const std::filesystem::path& base, const std::string& field, double time, const ScalarField& f,
                    const std::string& units) {
  write_snapshot(base, SnapshotHeader{f.grid(), field, 1, time, units}, f.values());
}

void write_snapshot(const std::filesystem::path& base, const std::string& field, double time, const VectorField3& f,
                    const std::string& units) {
  std::vector<double> v(f.size() * 3);
  for (std::size_t i = 0; i < f.size(); ++i)
    for (int k = 0; k < 3; ++k) v[3 * i + k] = f[k][i];
  write_snapshot(base, SnapshotHeader{f.grid(), field, 3, time, units}, v);
}

void write_snapshot(const std::filesystem::path& base, const std::string& field, double time, const ComplexField& f,
                    const std::string& units) {
  std::vector<double> v(f.size() * 2);
  for (std::size_t i = 0; i < f.size(); ++i) {
    v[2 * i] = f[i].real();
    v[2 * i + 1] = f[i].imag();
  }
  write_snapshot(base, SnapshotHeader{f.grid(), field, 2, time, units}, v);
}

Snapshot read_snapshot(const std::filesystem::path& base) {
  std::ifstream hdr(with_ext(base, ".hdr"));
  if (!hdr) throw ConfigError("missing snapshot header " + with_ext(base, ".hdr").string());
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(hdr, line)) {
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  for (const char* key : {"dim", "sizes", "lengths", "field", "components", "time"})
    if (!kv.count(key)) throw ConfigError(std::string("snapshot header lacks '") + key + "'");
  int dim = std::stoi(kv["dim"]);
  Index3 sizes{1, 1, 1};
  Vec3 lengths{1.0, 1.0, 1.0};
  std::istringstream ss(kv["sizes"]), ls(kv["lengths"]);
  for (int a = 0; a < dim; ++a) {
    if (!(ss >> sizes[a]) || !(ls >> lengths[a])) throw ConfigError("malformed snapshot sizes/lengths");
  }
  Snapshot s;
  s.header.grid = Grid(dim, sizes, lengths);
  s.header.field = kv["field"];
  s.header.components = std::stoi(kv["components"]);
  s.header.time = std::stod(kv["time"]);
  s.header.units = kv.count("units") ? kv["units"] : "";
  std::size_t n = s.header.grid.points() * static_cast<std::size_t>(s.header.components);
  std::ifstream bin(with_ext(base, ".bin"), std::ios::binary);
  if (!bin) throw ConfigError("missing snapshot data " + with_ext(base, ".bin").string());
  s.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t bits;
    if (!bin.read(reinterpret_cast<char*>(&bits), 8)) throw ConfigError("snapshot data truncated");
    bits = to_le(bits);
    std::memcpy(&s.values[i], &bits, 8);
  }
  return s;
}

ScalarField snapshot_scalar(const Snapshot& s) {
  if (s.header.components != 1) throw ConfigError("snapshot " + s.header.field + " is not scalar");
  return ScalarField(s.header.grid, s.values);
}

VectorField3 snapshot_vector(const Snapshot& s) {
  if (s.header.components != 3) throw ConfigError("snapshot " + s.header.field + " is not a 3-vector");
  VectorField3 v(s.header.grid);
  for (std::size_t i = 0; i < v.size(); ++i) v.set(i, {s.values[3 * i], s.values[3 * i + 1], s.values[3 * i + 2]});
  return v;
}

ComplexField snapshot_complex(const Snapshot& s) {
  if (s.header.components != 2) throw ConfigError("snapshot " + s.header.field + " is not complex");
  ComplexField c(s.header.grid);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = cplx(s.values[2 * i], s.values[2 * i + 1]);
  return c;
}

}  // namespace sf
