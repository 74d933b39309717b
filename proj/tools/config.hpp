#pragma once

// YAML run configuration for the ldrate command line tool. Unknown keys are
// rejected; every error carries the line of the offending node.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ldrate/gauss2d.hpp"
#include "ldrate/montecarlo.hpp"
#include "ldrate/nonconvex.hpp"
#include "ldrate/rate_engine.hpp"

namespace ldrate::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GridSpec {
  Vec lo, hi, step;
};

struct MapSpec {
  double x_lo = -1.0, x_hi = 3.0;
  int nx = 41;
  double y_lo = -10.0, y_hi = 10.0;
  int ny = 81;
};

struct McSpec {
  Vec z;
  double delta = 0.05;
  std::vector<long> n_list;
  long trials = 100000;
  std::optional<Vec> tilt;
  EventKind event = EventKind::Ball;
  double tolerance = 0.10;
  double abs_tolerance = 0.01;
  std::optional<double> computed_rate;
};

struct RunConfig {
  std::string preset;  // empty for a custom scenario
  std::optional<Scenario> scenario;
  std::optional<Gauss2DParams> gauss2d;
  std::optional<NonConvexScenario> nonconvex;

  std::string route = "dual";  // dual | infconv | closed
  std::vector<Vec> points;
  std::optional<GridSpec> grid;

  std::optional<McSpec> mc;
  MapSpec map;
  std::vector<double> thetas;

  std::optional<std::string> csv_path;
  std::optional<std::string> json_path;
  std::uint64_t seed = 1;
};

RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::string& path);

// Built-in scenario by name: cramer, figure1, example1, example2, gauss2d, nonconvex.
RunConfig preset_config(const std::string& name);

}  // namespace ldrate::cli
