#include "qresponse/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace qresponse::cli {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& text) {
  std::size_t pos = 0;
  double out;
  try {
    out = std::stod(text, &pos);
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + key + "' has non-numeric value '" + text + "'");
  }
  if (pos != text.size()) {
    throw ConfigError("config: key '" + key + "' has trailing characters in '" + text + "'");
  }
  return out;
}

}  // namespace

Config Config::parse_string(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']') {
        throw ConfigError("config line " + std::to_string(lineno) + ": malformed section header");
      }
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    }
    if (!section.empty() && key.find('.') == std::string::npos) {
      key = section + "." + key;
    }
    if (cfg.values_.count(key)) {
      throw ConfigError("config: duplicate key '" + key + "'");
    }
    cfg.values_[key] = value;
  }
  return cfg;
}

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot read config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_string(buffer.str());
}

std::string Config::get_string(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("config: missing required key '" + key + "'");
  consumed_.insert(key);
  return it->second;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  consumed_.insert(key);
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key) const {
  return parse_double(key, get_string(key));
}

double Config::get_double(const std::string& key, double fallback) const {
  consumed_.insert(key);
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : parse_double(key, it->second);
}

int Config::get_int(const std::string& key, int fallback) const {
  const double v = get_double(key, static_cast<double>(fallback));
  if (v != std::floor(v)) throw ConfigError("config: key '" + key + "' must be an integer");
  return static_cast<int>(v);
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  const std::string v = get_string(key, fallback ? "true" : "false");
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("config: key '" + key + "' must be a boolean, got '" + v + "'");
}

std::vector<double> Config::get_grid(const std::string& key) const {
  const std::string spec = get_string(key);
  std::vector<double> out;
  if (spec.rfind("lin:", 0) == 0 || spec.rfind("log:", 0) == 0) {
    const bool logscale = spec[1] == 'o';
    std::istringstream in(spec.substr(4));
    std::string a, b, n;
    if (!std::getline(in, a, ':') || !std::getline(in, b, ':') || !std::getline(in, n)) {
      throw ConfigError("config: grid '" + key + "' must be lin:start:stop:count");
    }
    const double lo = parse_double(key, trim(a));
    const double hi = parse_double(key, trim(b));
    const double cnt = parse_double(key, trim(n));
    if (cnt < 1 || cnt != std::floor(cnt)) {
      throw ConfigError("config: grid '" + key + "' count must be a positive integer");
    }
    const int count = static_cast<int>(cnt);
    if (logscale && (lo <= 0.0 || hi <= 0.0)) {
      throw ConfigError("config: log grid '" + key + "' needs positive endpoints");
    }
    for (int i = 0; i < count; ++i) {
      const double f = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
      out.push_back(logscale ? lo * std::pow(hi / lo, f) : lo + (hi - lo) * f);
    }
    return out;
  }
  std::istringstream in(spec);
  std::string item;
  while (std::getline(in, item, ',')) {
    const std::string v = trim(item);
    if (!v.empty()) out.push_back(parse_double(key, v));
  }
  if (out.empty()) throw ConfigError("config: grid '" + key + "' is empty");
  return out;
}

void Config::require_all_consumed() const {
  std::string unknown;
  for (const auto& [key, value] : values_) {
    if (!consumed_.count(key)) {
      if (!unknown.empty()) unknown += ", ";
      unknown += key;
    }
  }
  if (!unknown.empty()) {
    throw ConfigError("config: unknown keys: " + unknown);
  }
}

std::vector<std::pair<std::string, std::string>> Config::entries() const {
  std::vector<std::pair<std::string, std::string>> out;
  out.reserve(values_.size());
  for (const auto& kv : values_) out.push_back(kv);
  return out;
}

}  // namespace qresponse::cli
