#pragma once

#include <string>

#include "qresponse/cli/table.hpp"

namespace qresponse::cli {

// Minimal line chart: first column on x, every other column as a polyline.
void write_line_chart(const ResultTable& table, const std::string& path);

}  // namespace qresponse::cli
