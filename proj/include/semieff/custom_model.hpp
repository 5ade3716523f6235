#pragma once

#include <string>

#include "semieff/expr.hpp"
#include "semieff/model.hpp"

namespace semieff {

/// Declarative univariate model: density expression over a finite interval or
/// an integer lattice. Scores and nuisance directions use central differences.
struct CustomModelSpec {
  std::string name;
  std::string density;  // expression for p(x; theta, z), not its logarithm
  int theta_dim = 1;
  int z_dim = 1;
  Support support;  // range must be finite
  Vec default_theta;
  Vec default_z;
};

ModelPtr custom_model(const CustomModelSpec& spec);

/// Parses {"name", "density", "theta_dim", "z_dim", "support": {"kind", "lo", "hi"},
/// "default_theta", "default_z"}; unknown keys are rejected.
CustomModelSpec parse_custom_model_spec(const std::string& json_text);

}  // namespace semieff
