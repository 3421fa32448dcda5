#include "apcs/config.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "apcs/errors.hpp"

namespace apcs {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& v, const std::string& where) {
  std::size_t pos = 0;
  double x;
  try {
    x = std::stod(v, &pos);
  } catch (const std::exception&) {
    throw ConfigError(where + ": not a number: '" + v + "'");
  }
  if (pos != v.size()) throw ConfigError(where + ": trailing characters in '" + v + "'");
  return x;
}

} // namespace

ConfigFile ConfigFile::parse(std::istream& is, const std::string& origin) {
  ConfigFile cfg;
  std::string line, section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::size_t comment = line.find_first_of("#;");
    if (comment != std::string::npos) line.erase(comment);
    line = trim(line);
    if (line.empty()) continue;
    std::string where = origin + ":" + std::to_string(lineno);
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3)
        throw ConfigError(where + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    std::size_t eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(where + ": empty key");
    if (section.empty()) throw ConfigError(where + ": entry before any [section]");
    if (!cfg.sections_[section].emplace(key, value).second)
      throw ConfigError(where + ": duplicate key '" + key + "' in [" + section + "]");
  }
  return cfg;
}

ConfigFile ConfigFile::parse_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file: " + path);
  return parse(is, path);
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
  auto s = sections_.find(section);
  return s != sections_.end() && s->second.count(key) > 0;
}

void ConfigFile::set(const std::string& section, const std::string& key,
                     const std::string& value) {
  sections_[section][key] = value;
}

std::string ConfigFile::get(const std::string& section, const std::string& key) const {
  auto s = sections_.find(section);
  if (s != sections_.end()) {
    auto k = s->second.find(key);
    if (k != s->second.end()) return k->second;
  }
  throw ConfigError("missing config entry [" + section + "] " + key);
}

std::string ConfigFile::get_or(const std::string& section, const std::string& key,
                               const std::string& fallback) const {
  return has(section, key) ? get(section, key) : fallback;
}

double ConfigFile::get_double(const std::string& section, const std::string& key) const {
  return parse_double(get(section, key), "[" + section + "] " + key);
}

double ConfigFile::get_double_or(const std::string& section, const std::string& key,
                                 double fallback) const {
  return has(section, key) ? get_double(section, key) : fallback;
}

int ConfigFile::get_int(const std::string& section, const std::string& key) const {
  double x = get_double(section, key);
  int i = static_cast<int>(x);
  if (double(i) != x)
    throw ConfigError("[" + section + "] " + key + ": expected an integer");
  return i;
}

int ConfigFile::get_int_or(const std::string& section, const std::string& key,
                           int fallback) const {
  return has(section, key) ? get_int(section, key) : fallback;
}

std::uint64_t ConfigFile::get_u64_or(const std::string& section, const std::string& key,
                                     std::uint64_t fallback) const {
  if (!has(section, key)) return fallback;
  const std::string v = get(section, key);
  try {
    return std::stoull(v);
  } catch (const std::exception&) {
    throw ConfigError("[" + section + "] " + key + ": expected an unsigned integer");
  }
}

bool ConfigFile::get_bool_or(const std::string& section, const std::string& key,
                             bool fallback) const {
  if (!has(section, key)) return fallback;
  std::string v = get(section, key);
  for (char& c : v) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  throw ConfigError("[" + section + "] " + key + ": expected a boolean");
}

std::vector<double> ConfigFile::get_doubles(const std::string& section,
                                            const std::string& key) const {
  std::string v = get(section, key);
  for (char& c : v)
    if (c == ',') c = ' ';
  std::istringstream is(v);
  std::vector<double> out;
  std::string tok;
  while (is >> tok) out.push_back(parse_double(tok, "[" + section + "] " + key));
  if (out.empty()) throw ConfigError("[" + section + "] " + key + ": empty list");
  return out;
}

std::string ConfigFile::digest() const {
  // FNV-1a over the canonical section/key/value serialization.
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ull;
    }
    h ^= 0x1f;
    h *= 1099511628211ull;
  };
  for (const auto& [section, entries] : sections_) {
    mix(section);
    for (const auto& [key, value] : entries) {
      mix(key);
      mix(value);
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

} // namespace apcs
