#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pvi/fk_solver.hpp"
#include "pvi/validation.hpp"

namespace pvi {

inline constexpr int kConfigVersion = 1;

struct ValidationSettings {
  int samples = 1000;
  SampleRanges ranges;
  std::vector<double> eps_list{1e-1, 1e-2, 1e-3};
  bool check_uniqueness = false;
};

struct OracleSettings {
  double tolerance = 5e-2;
  int nx = 200;
  int nt = 400;
  double theta = 1.0;
};

struct GridSpec {
  std::vector<double> times;
  std::vector<Point> points;
};

// A parsed run configuration. `canonical` is the input re-serialised with
// sorted keys, used for echoes and digests.
struct RunConfig {
  std::shared_ptr<const ProblemSpec> problem;
  McConfig mc;
  ValidationSettings validation;
  OracleSettings oracle;
  std::optional<GridSpec> grid;
  std::string canonical;
};

// Strict schema: every object rejects keys it does not know, "version" must be
// present and equal kConfigVersion. Malformed JSON raises ParseError with the
// byte offset; schema violations raise ConfigError naming the JSON path.
RunConfig parse_config(std::string_view text);
RunConfig load_config_file(const std::string& path);

}  // namespace pvi
