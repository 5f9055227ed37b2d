#include "qresponse/cli/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "qresponse/errors.hpp"

namespace qresponse::cli {

namespace {

constexpr double kWidth = 680, kHeight = 440;
constexpr double kLeft = 70, kRight = 20, kTop = 20, kBottom = 50;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b"};

}  // namespace

void write_line_chart(const ResultTable& table, const std::string& path) {
  if (table.rows.empty() || table.columns.size() < 2) {
    throw NumericError("write_line_chart: need at least two columns and one row");
  }
  double xmin = table.rows.front()[0], xmax = xmin;
  double ymin = table.rows.front()[1], ymax = ymin;
  for (const auto& row : table.rows) {
    xmin = std::min(xmin, row[0]);
    xmax = std::max(xmax, row[0]);
    for (std::size_t c = 1; c < row.size(); ++c) {
      ymin = std::min(ymin, row[c]);
      ymax = std::max(ymax, row[c]);
    }
  }
  if (xmax == xmin) xmax = xmin + 1.0;
  if (ymax == ymin) ymax = ymin + 1.0;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto sx = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * plot_w; };
  auto sy = [&](double y) { return kTop + (ymax - y) / (ymax - ymin) * plot_h; };

  std::ofstream out(path);
  if (!out) throw std::ios_base::failure("cannot write " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\">\n";
  out << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << plot_w
      << "\" height=\"" << plot_h << "\" fill=\"none\" stroke=\"black\"/>\n";
  // min/max tick labels
  out << "<text x=\"" << kLeft << "\" y=\"" << kHeight - 28
      << "\" font-size=\"12\">" << format_double(xmin) << "</text>\n";
  out << "<text x=\"" << kLeft + plot_w - 60 << "\" y=\"" << kHeight - 28
      << "\" font-size=\"12\">" << format_double(xmax) << "</text>\n";
  out << "<text x=\"4\" y=\"" << kTop + plot_h << "\" font-size=\"12\">"
      << format_double(ymin) << "</text>\n";
  out << "<text x=\"4\" y=\"" << kTop + 12 << "\" font-size=\"12\">"
      << format_double(ymax) << "</text>\n";
  out << "<text x=\"" << kLeft + plot_w / 2 - 20 << "\" y=\"" << kHeight - 8
      << "\" font-size=\"13\">" << table.columns[0] << "</text>\n";

  for (std::size_t c = 1; c < table.columns.size(); ++c) {
    const char* color = kPalette[(c - 1) % 6];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& row : table.rows) {
      out << sx(row[0]) << "," << sy(row[c]) << " ";
    }
    out << "\"/>\n";
    out << "<text x=\"" << kLeft + 8 << "\" y=\"" << kTop + 16 * c
        << "\" font-size=\"12\" fill=\"" << color << "\">" << table.columns[c]
        << "</text>\n";
  }
  out << "</svg>\n";
  if (!out.good()) throw std::ios_base::failure("write failed: " + path);
}

}  // namespace qresponse::cli
