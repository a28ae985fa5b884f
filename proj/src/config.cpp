#include "spinfluid/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "spinfluid/errors.hpp"

namespace sf {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

Config parse_stream(std::istream& in, const std::string& origin) {
  boost::property_tree::ptree pt;
  try {
    boost::property_tree::ini_parser::read_ini(in, pt);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(fmt::format("{}: line {}: {}", origin, e.line(), e.message()));
  }
  Config c;
  for (const auto& [section, body] : pt) {
    if (body.empty() && !body.data().empty())
      throw ConfigError(fmt::format("{}: key '{}' appears outside any section", origin, section));
    for (const auto& [key, value] : body) c.set(section + "." + key + "=" + value.data());
  }
  return c;
}

}  // namespace

double parse_number(const std::string& text, const std::string& what) {
  std::string t = trim(text);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v))
    throw ConfigError(fmt::format("{}: expected a finite number, got '{}'", what, text));
  return v;
}

long long parse_integer(const std::string& text, const std::string& what) {
  std::string t = trim(text);
  long long v = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size())
    throw ConfigError(fmt::format("{}: expected an integer, got '{}'", what, text));
  return v;
}

bool parse_bool(const std::string& text, const std::string& what) {
  std::string t = lower(trim(text));
  if (t == "true" || t == "yes" || t == "on" || t == "1") return true;
  if (t == "false" || t == "no" || t == "off" || t == "0") return false;
  throw ConfigError(fmt::format("{}: expected true or false, got '{}'", what, text));
}

Vec3 parse_vec3(const std::string& text, const std::string& what) {
  std::string t = text;
  std::replace(t.begin(), t.end(), ',', ' ');
  std::istringstream in(t);
  Vec3 v{0.0, 0.0, 0.0};
  std::string tok;
  int n = 0;
  while (in >> tok) {
    if (n == 3) throw ConfigError(fmt::format("{}: expected at most three numbers, got '{}'", what, text));
    v[n++] = parse_number(tok, what);
  }
  if (n == 0) throw ConfigError(fmt::format("{}: expected one to three numbers, got '{}'", what, text));
  return v;
}

Config Config::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("config: cannot open '{}'", path.string()));
  return parse_stream(in, path.string());
}

Config Config::from_string(const std::string& text) {
  std::istringstream in(text);
  return parse_stream(in, "config");
}

void Config::set(const std::string& assignment) {
  auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw ConfigError(fmt::format("override '{}' must have the form SECTION.KEY=VALUE", assignment));
  std::string path = trim(assignment.substr(0, eq));
  auto dot = path.rfind('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 == path.size())
    throw ConfigError(fmt::format("override '{}' must have the form SECTION.KEY=VALUE", assignment));
  data_[trim(path.substr(0, dot))][trim(path.substr(dot + 1))] = trim(assignment.substr(eq + 1));
}

bool Config::has(const std::string& section, const std::string& key) const {
  auto s = data_.find(section);
  return s != data_.end() && s->second.count(key) > 0;
}

bool Config::has_section(const std::string& section) const { return data_.count(section) > 0; }

std::optional<std::string> Config::raw(const std::string& section, const std::string& key) const {
  auto s = data_.find(section);
  if (s == data_.end()) return std::nullopt;
  auto k = s->second.find(key);
  if (k == s->second.end()) return std::nullopt;
  used_.insert({section, key});
  return k->second;
}

void Config::note_default(const std::string& section, const std::string& key, const std::string& value) const {
  defaults_[section].emplace(key, value);
}

std::string Config::text(const std::string& section, const std::string& key, const std::string& fallback) const {
  auto v = raw(section, key);
  if (!v) note_default(section, key, fallback);
  return v ? *v : fallback;
}

double Config::number(const std::string& section, const std::string& key, double fallback) const {
  auto v = raw(section, key);
  if (!v) note_default(section, key, fmt::format("{}", fallback));
  return v ? parse_number(*v, section + "." + key) : fallback;
}

long long Config::integer(const std::string& section, const std::string& key, long long fallback) const {
  auto v = raw(section, key);
  if (!v) note_default(section, key, std::to_string(fallback));
  return v ? parse_integer(*v, section + "." + key) : fallback;
}

bool Config::boolean(const std::string& section, const std::string& key, bool fallback) const {
  auto v = raw(section, key);
  if (!v) note_default(section, key, fallback ? "true" : "false");
  return v ? parse_bool(*v, section + "." + key) : fallback;
}

Vec3 Config::vec3(const std::string& section, const std::string& key, const Vec3& fallback) const {
  auto v = raw(section, key);
  if (!v) note_default(section, key, fmt::format("{} {} {}", fallback[0], fallback[1], fallback[2]));
  return v ? parse_vec3(*v, section + "." + key) : fallback;
}

std::vector<std::string> Config::sections(const std::string& prefix) const {
  std::vector<std::string> out;
  for (const auto& [name, body] : data_)
    if (name.rfind(prefix, 0) == 0) out.push_back(name);
  return out;
}

void Config::require_all_used() const {
  std::vector<std::string> unknown;
  for (const auto& [section, body] : data_)
    for (const auto& [key, value] : body)
      if (!used_.count({section, key})) unknown.push_back(section + "." + key);
  if (!unknown.empty()) throw ConfigError(fmt::format("unknown config key(s): {}", fmt::join(unknown, ", ")));
}

std::string Config::echo() const {
  std::map<std::string, std::map<std::string, std::pair<std::string, bool>>> all;
  for (const auto& [section, body] : defaults_)
    for (const auto& [key, value] : body) all[section][key] = {value, true};
  for (const auto& [section, body] : data_)
    for (const auto& [key, value] : body) all[section][key] = {value, false};
  std::string out;
  for (const auto& [section, body] : all) {
    out += fmt::format("[{}]\n", section);
    for (const auto& [key, entry] : body)
      out += entry.second ? fmt::format("; {} = {}  (default)\n", key, entry.first)
                          : fmt::format("{} = {}\n", key, entry.first);
  }
  return out;
}

}  // namespace sf
