#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "semieff/measure.hpp"
#include "semieff/model.hpp"
#include "semieff/tolerances.hpp"

namespace semieff::cli {

struct SchemeConfig {
  std::string kind = "default";  // default | gauss-legendre | monte-carlo
  int panels = 40;
  int order = 10;
  std::optional<double> lo, hi;
  std::size_t nodes = 4000;
};

struct PathOptions {
  std::string kind = "parametric";  // parametric | linear
  double tangent_scale = 1.0;
  int component = 0;
  int k0 = 3;
  int k1 = 16;
};

struct GradientOptions {
  std::string functional = "mean";  // mean | second-moment | squared-mean
  std::string cone = "T3";
};

struct GodambeOptions {
  std::string battery = "default";  // default | location | conditioning | score
  bool extended = true;
};

struct SolveConfig {
  std::string psi = "score";
  std::size_t n = 500;
  std::optional<Vec> theta_init;
};

struct McConfig {
  std::string psi = "score";
  std::size_t n = 2000;
  std::size_t reps = 200;
  bool dump_estimates = false;
};

struct ConditioningOptions {
  std::vector<double> theta_grid;
  std::vector<Vec> z_grid;
};

struct RunConfig {
  std::string command;
  std::string model_label;  // builtin name, or the custom spec's name
  ModelPtr model;
  Vec theta;
  Vec z;
  std::vector<Vec> z_grid;  // empty: the model's default grid
  SchemeConfig scheme;
  Tolerances tol;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  PathOptions path;
  GradientOptions gradient;
  GodambeOptions godambe;
  SolveConfig solve;
  McConfig mc;
  ConditioningOptions conditioning;
};

/// Values given on the command line; each one overrides the config file.
struct FlagOverrides {
  std::string config_path;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> model;
  std::optional<std::string> theta;
  std::optional<std::string> z;
};

/// Throws ConfigError naming the offending field.
RunConfig load_config(const std::string& command, const FlagOverrides& flags);

/// Throws ConfigError unless a seed is configured; `what` names the step.
std::uint64_t require_seed(const RunConfig& cfg, const std::string& what);

/// Scheme for (theta, z) honouring the scheme block of the config.
SchemePtr make_scheme(const RunConfig& cfg);

}  // namespace semieff::cli
