#ifndef APCS_CONFIG_HPP
#define APCS_CONFIG_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace apcs {

// Sectioned key-value configuration file: `[section]` headers, `key = value`
// entries, `#` or `;` comments. Keys are unique within a section.
class ConfigFile {
public:
  static ConfigFile parse(std::istream& is, const std::string& origin = "<stream>");
  static ConfigFile parse_file(const std::string& path);

  bool has(const std::string& section, const std::string& key) const;
  void set(const std::string& section, const std::string& key, const std::string& value);

  std::string get(const std::string& section, const std::string& key) const;
  std::string get_or(const std::string& section, const std::string& key,
                     const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key) const;
  double get_double_or(const std::string& section, const std::string& key,
                       double fallback) const;
  int get_int(const std::string& section, const std::string& key) const;
  int get_int_or(const std::string& section, const std::string& key, int fallback) const;
  std::uint64_t get_u64_or(const std::string& section, const std::string& key,
                           std::uint64_t fallback) const;
  bool get_bool_or(const std::string& section, const std::string& key,
                   bool fallback) const;
  // Comma or whitespace separated list of reals.
  std::vector<double> get_doubles(const std::string& section, const std::string& key) const;

  const std::map<std::string, std::map<std::string, std::string>>& sections() const {
    return sections_;
  }
  // Stable content digest for run manifests.
  std::string digest() const;

private:
  std::map<std::string, std::map<std::string, std::string>> sections_;
};

} // namespace apcs

#endif
