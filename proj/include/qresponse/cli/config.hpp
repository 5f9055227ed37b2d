#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace qresponse::cli {

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Flat key-value configs with INI-style sections. A key inside [model] is
// addressed as "model.d"; the dotted form is accepted directly so an echoed
// config round-trips through the same parser. '#' and ';' lines are
// comments. Every key must be consumed by the experiment schema; leftovers
// are rejected.
class Config {
 public:
  static Config parse_file(const std::string& path);
  static Config parse_string(const std::string& text);

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  // comma list of doubles, or "lin:a:b:n" / "log:a:b:n" grid specs
  std::vector<double> get_grid(const std::string& key) const;

  // throws listing keys never consumed by any getter
  void require_all_consumed() const;

  // resolved key-value pairs in deterministic order, for the config echo
  std::vector<std::pair<std::string, std::string>> entries() const;

 private:
  std::map<std::string, std::string> values_;
  mutable std::set<std::string> consumed_;
};

}  // namespace qresponse::cli
