#pragma once

// JSON run configuration.

#include <string>

#include "finsler/verify.hpp"

namespace finsler {

struct Config {
  FinslerModel model;
  SuiteOptions options;
  /// Model part of the configuration as it is echoed into reports.
  Json echo;
};

/// Throws ConfigError for unreadable files, bad JSON, unknown checks, bad
/// values and expressions that fail to parse.
Config load_config(const std::string& path);
Config parse_config(const Json& j);

/// "x=2,0,0;y=1,2,1" -> chart point of the given dimension.
ChartPoint parse_point(const std::string& text, int dim);

}  // namespace finsler
