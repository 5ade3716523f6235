#pragma once

#include "semieff/model.hpp"

namespace semieff::testing {

/// (1 - w) phi(x - theta) + w phi(x - theta - z): the least favourable
/// direction turns with z, so l_E is not attainable by one inference function.
ModelPtr rotating_mixture_model(double w = 0.3);

/// N(theta + z, 1) with nuisance dictionary {x - theta - z}: the score lies in
/// the nuisance tangent space and l_E vanishes.
ModelPtr degenerate_model();

/// N(eta / c, z): normal-mean in the parameter eta = c theta.
ModelPtr reparametrised_normal_model(double c);

/// Gaussian log density, for closed-form oracles.
double log_normal(double x, double mean, double var);

}  // namespace semieff::testing
