#pragma once

#include <stdexcept>
#include <string>

namespace qresponse {

// Numerical failure carrying a human-readable diagnostic.
struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// Raised by curvature/response operations that refuse to evaluate across a
// (near-)degenerate spectrum. Carries the offending gap.
struct DegeneratePointError : NumericError {
  double gap;
  DegeneratePointError(const std::string& what, double gap_)
      : NumericError(what), gap(gap_) {}
};

// Raised by inversion solvers when the measured system carries no
// information about a requested unknown.
struct UnidentifiableError : std::runtime_error {
  explicit UnidentifiableError(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace qresponse
