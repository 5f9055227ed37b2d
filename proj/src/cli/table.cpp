#include "qresponse/cli/table.hpp"

#include <cstdio>
#include <fstream>

#include "qresponse/errors.hpp"

namespace qresponse::cli {

std::string format_double(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

void write_csv(const ResultTable& table, const std::string& path) {
  if (table.rows.empty() || table.columns.empty()) {
    throw NumericError("write_csv: refusing to write an empty table");
  }
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size()) {
      throw NumericError("write_csv: ragged row");
    }
  }
  std::ofstream out(path);
  if (!out) throw std::ios_base::failure("cannot write " + path);
  out << "# qresponse " << kVersion << "\n";
  out << "# config-echo-begin\n";
  for (const auto& [key, value] : table.config_echo) {
    out << "# " << key << " = " << value << "\n";
  }
  out << "# config-echo-end\n";
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    out << (c ? "," : "") << table.columns[c];
  }
  out << "\n";
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      out << (c ? "," : "") << format_double(row[c]);
    }
    out << "\n";
  }
  if (!out.good()) throw std::ios_base::failure("write failed: " + path);
}

void write_summary(const std::vector<std::pair<std::string, std::string>>& entries,
                   const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::ios_base::failure("cannot write " + path);
  for (const auto& [key, value] : entries) {
    out << key << " = " << value << "\n";
  }
  if (!out.good()) throw std::ios_base::failure("write failed: " + path);
}

}  // namespace qresponse::cli
