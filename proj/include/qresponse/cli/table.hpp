#pragma once

#include <string>
#include <vector>

namespace qresponse::cli {

inline constexpr const char* kVersion = "0.1.0";

// Numeric result rows plus the metadata echoed into every output file.
struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  // resolved config entries; echoed as re-parseable '# key = value' lines
  std::vector<std::pair<std::string, std::string>> config_echo;
};

// '#'-prefixed metadata header (version + config echo), one header line of
// column names, then comma-separated rows at 17 significant digits.
// Volatile metadata (wall time) never enters the CSV so identical configs
// produce bitwise-identical files.
void write_csv(const ResultTable& table, const std::string& path);

// key = value summary file; this is where wall time and derived scalars go.
void write_summary(const std::vector<std::pair<std::string, std::string>>& entries,
                   const std::string& path);

std::string format_double(double value);

}  // namespace qresponse::cli
