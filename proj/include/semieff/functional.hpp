#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "semieff/measure.hpp"
#include "semieff/model.hpp"
#include "semieff/tangent.hpp"
#include "semieff/tolerances.hpp"

namespace semieff {

/// phi: densities on a scheme -> R^q.
struct Functional {
  std::string name;
  int dim = 1;
  std::function<Vec(const Density&)> eval;
  /// Optional closed-form gradient at p.
  std::function<std::vector<L2Vec>(const DensityPtr&)> candidate_gradient;
};

/// M(p) = integral of x p (first coordinate of the sample point).
Functional mean_functional();
/// integral of x^2 p.
Functional second_moment_functional();
/// g o phi; the candidate gradient, if any, is carried through the chain rule
/// with the supplied Jacobian of g.
Functional compose(const Functional& phi, std::function<Vec(const Vec&)> g,
                   std::function<Mat(const Vec&)> g_jacobian, std::string name);

struct DirectionalResidual {
  int direction = 0;
  int component = 0;
  bool feasible = true;
  double slope = 0.0;      // extrapolated difference quotient
  double predicted = 0.0;  // <gradient_component, nu>
  double residual = 0.0;
  std::string note;
};

struct GradientResult {
  std::vector<L2Vec> gradient;
  std::vector<L2Vec> canonical;
  std::vector<DirectionalResidual> residuals;
  Mat cov_gradient;
  Mat cov_canonical;
  double max_residual = 0.0;
  bool passed = false;
};

/// Checks d/dt phi(p_t) = <grad, nu> along the linear path of every cone basis
/// direction, using Richardson extrapolation 2 D(t/2) - D(t) on the two
/// smallest feasible grid values.
GradientResult verify_gradient(const Functional& phi, const DensityPtr& p, const Subspace& cone,
                               const std::vector<L2Vec>& grad, const Tolerances& tol = {},
                               const std::vector<double>& ts = dyadic_grid());

/// Componentwise projection onto the closed span of the cone.
std::vector<L2Vec> canonical_gradient(const std::vector<L2Vec>& grad, const Subspace& cone_span);

/// Gradient of g o phi: rows of the Jacobian combine the components of grad.
std::vector<L2Vec> chain_rule(const std::vector<L2Vec>& grad, const Mat& g_jacobian);

/// Matrix of inner products <f_i, f_j>.
Mat covariance(const std::vector<L2Vec>& f);

struct InfluenceReport {
  std::size_t n = 0;
  std::size_t reps = 0;
  std::uint64_t seed = 0;
  Mat empirical_cov;
  Mat target_cov;
  double relative_error = 0.0;  // Frobenius, relative to the target
};

/// One-step plug-in theta_hat = theta0 + mean IC over n draws, repeated `reps`
/// times; compares the empirical covariance of sqrt(n)(theta_hat - theta0)
/// with the integral of IC IC^T p on the model's default scheme.
InfluenceReport influence_to_estimator_check(const std::function<Vec(Point)>& influence,
                                             const DensityModel& model, const Vec& theta,
                                             const Vec& z, std::size_t n, std::size_t reps,
                                             std::uint64_t seed);

/// Seed for replication `rep` of a study seeded with `seed`.
std::uint64_t replication_seed(std::uint64_t seed, std::uint64_t rep);

}  // namespace semieff
