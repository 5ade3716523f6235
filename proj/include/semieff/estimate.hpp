#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "semieff/godambe.hpp"
#include "semieff/measure.hpp"
#include "semieff/model.hpp"

namespace semieff {

struct SolveOptions {
  double tol_root = 1e-8;  // per parameter component; scaled by q
  int max_iter = 100;
  int max_halvings = 30;
};

struct SolveIterate {
  Vec theta;
  double residual = 0.0;  // |sum psi| / n
  double step = 0.0;      // damping factor used to reach this iterate
};

struct SolveTrace {
  std::vector<SolveIterate> iterates;
  bool converged = false;
  Vec theta_hat;
  Mat jacobian;  // (1/n) d sum psi / d theta at theta_hat
  std::string method = "newton";
};

/// Root of sum_i psi(x_i; theta, z) = 0 by damped Newton with a central
/// finite-difference Jacobian; bisection fallback for q = 1 when Newton stalls.
SolveTrace solve(const InferenceFn& psi, const PointSet& sample, const Vec& theta_init,
                 const Vec& z, const SolveOptions& opts = {});

struct McReport {
  std::size_t n = 0;
  std::size_t reps = 0;
  std::uint64_t seed = 0;
  Vec theta0;
  Vec z0;
  Mat empirical_cov;      // covariance of sqrt(n)(theta_hat - theta0)
  Mat target_J_inv;       // J_psi^-1
  Mat semiparametric_bound;  // J_E^-1
  double deviation_from_target = 0.0;  // |emp - J^-1|_F / |J^-1|_F
  double ratio_to_bound = 0.0;         // trace(emp) / trace(J_E^-1)
  double median_abs_error = 0.0;       // median |theta_hat - theta0|
  std::size_t failures = 0;
  bool valid = true;
  std::vector<Vec> estimates;  // per replication; empty vector if it failed
  std::vector<bool> converged;
};

/// Replication study: per-rep seeds from (seed, rep), theta_init = theta0 +
/// 0.05 max(1, |theta0|). Invalid when more than 5% of the reps fail.
McReport mc_study(const InferenceFn& psi, const DensityModel& model, const Vec& theta0,
                  const Vec& z0, std::size_t n, std::size_t reps, std::uint64_t seed,
                  const SolveOptions& opts = {});

}  // namespace semieff
