#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "spinfluid/grid.hpp"

namespace sf {

/// Sectioned key = value configuration. Every lookup marks the key as used so that
/// misspelled keys can be reported.
class Config {
 public:
  static Config from_file(const std::filesystem::path& path);
  static Config from_string(const std::string& text);

  /// Applies "SECTION.KEY=VALUE"; the key is the part after the last dot.
  void set(const std::string& assignment);

  bool has(const std::string& section, const std::string& key) const;
  bool has_section(const std::string& section) const;
  std::optional<std::string> raw(const std::string& section, const std::string& key) const;

  std::string text(const std::string& section, const std::string& key, const std::string& fallback) const;
  double number(const std::string& section, const std::string& key, double fallback) const;
  long long integer(const std::string& section, const std::string& key, long long fallback) const;
  bool boolean(const std::string& section, const std::string& key, bool fallback) const;
  Vec3 vec3(const std::string& section, const std::string& key, const Vec3& fallback) const;

  /// Sections whose name starts with `prefix`, in lexicographic order.
  std::vector<std::string> sections(const std::string& prefix) const;
  /// Throws ConfigError naming every key that was never looked up.
  void require_all_used() const;
  /// Every key looked up so far with its value, defaults marked; sections and keys sorted.
  std::string echo() const;

 private:
  void note_default(const std::string& section, const std::string& key, const std::string& value) const;

  std::map<std::string, std::map<std::string, std::string>> data_;
  mutable std::map<std::string, std::map<std::string, std::string>> defaults_;
  mutable std::set<std::pair<std::string, std::string>> used_;
};

/// Parses a finite double; ConfigError names `what` on failure.
double parse_number(const std::string& text, const std::string& what);
long long parse_integer(const std::string& text, const std::string& what);
bool parse_bool(const std::string& text, const std::string& what);
/// One to three whitespace- or comma-separated numbers, missing entries zero.
Vec3 parse_vec3(const std::string& text, const std::string& what);

}  // namespace sf
