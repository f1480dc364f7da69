#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "finsler/geometry.hpp"

namespace testing {

inline finsler::FinslerModel example_model(double m = 2.0) {
  return finsler::make_model(3, "example", "sqrt(y1^2 + x1^2*y2^3/y3)", {"x1", "0", "0"},
                             {"x1", "y2", "y3", "y1^2 + x1^2*y2^3/y3"}, m);
}

inline finsler::FinslerModel flat_model(double m = 1.0) {
  return finsler::make_model(3, "flat", "sqrt(y1^2 + y2^2 + y3^2)", {"-x1", "-x2", "-x3"}, {}, m);
}

// Upper half-plane with the hyperbolic metric, curvature -1.
inline finsler::FinslerModel hyperbolic_model() {
  return finsler::make_model(2, "hyperbolic", "sqrt(y1^2 + y2^2)/x2", {}, {"x2"});
}

inline double max_diff(const finsler::Matrix& a, const finsler::Matrix& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[i].size(); ++j) m = std::max(m, std::abs(a[i][j] - b[i][j]));
  return m;
}

inline double max_diff(const finsler::Vector& a, const finsler::Vector& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline std::string config_path(const std::string& name) { return std::string(FINSLER_CONFIG_DIR) + "/" + name; }

}  // namespace testing
