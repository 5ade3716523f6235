#pragma once

#include <functional>
#include <string>
#include <vector>

#include "semieff/godambe.hpp"
#include "semieff/model.hpp"
#include "semieff/tolerances.hpp"

namespace semieff {

/// p(x; theta, z) = f_t(x; theta) h(t(x); theta, z), q = 1.
struct FactorizedModel {
  std::string name;
  ModelPtr base;
  std::function<double(Point)> statistic;
  std::function<double(Point, double theta)> log_f_t;
  std::function<double(double t, double theta, const Vec& z)> log_h;
  bool completeness_declared = false;
};

/// Poisson-pair: t = x1 + x2, x2 | t ~ Binomial(t, theta/(1+theta)),
/// t ~ Poisson(z(1+theta)). Completeness of t is declared.
FactorizedModel poisson_pair_factorization();

struct FactorizationCheck {
  double max_decomposition_error = 0.0;  // |log p - log f_t - log h|
  double max_fiber_mass_error = 0.0;     // |sum over fiber of f_t - 1|
};

/// Throws ModelError when a fiber does not normalise within tol_mass or the
/// decomposition is off by more than 1e-10.
FactorizationCheck verify_factorization(const FactorizedModel& fm, double theta, const Vec& z,
                                        const Tolerances& tol = {});

/// psi(x; theta) = d/dtheta log f_t(x; theta), central differences.
InferenceFn conditional_score(const FactorizedModel& fm);

/// max over fibers t of |E[psi | t]| under p(.; theta, z).
double max_fiber_mean(const InferenceFn& psi, const FactorizedModel& fm, double theta,
                      const Vec& z);

struct DecompositionResidual {
  double A = 1.0;
  L2Vec psi;
  L2Vec l;
  L2Vec R;  // psi - A l
  /// max |R - (-d/dtheta log h(t))| over nodes.
  double R_formula_error = 0.0;
  /// max over nodes of the spread of R inside one fiber.
  double R_fiber_spread = 0.0;
  std::vector<std::pair<std::string, double>> orthogonality;  // <R, phi> per member
  double score_sensitivity_ratio = 0.0;  // E[psi l] / E[psi']
};

/// Decomposition psi = A l + R with A = 1 for the conditional score;
/// `battery` should contain regular inference functions.
DecompositionResidual decomposition_residual(const FactorizedModel& fm, double theta, const Vec& z,
                                             const std::vector<InferenceFn>& battery,
                                             const Tolerances& tol = {});

/// The eight fixed battery members (see docs/conditioning-battery.md):
/// conditional score, 2 x conditional score, x2 - theta x1, partial score
/// (quasi), fiber-centred x2^2, (x2 - t pi) t, fiber-centred x1 x2,
/// (x2 - theta x1) + (t - z(1+theta)) (quasi); pi = theta / (1 + theta).
std::vector<InferenceFn> conditioning_battery(const FactorizedModel& fm);

struct DemoMember {
  std::string name;
  bool depends_on_nuisance = false;
  bool regular = false;
  double J = 0.0;      // classical Godambe information
  double J_ext = 0.0;  // with extended sensitivity; used for ranking
  double fiber_mean = 0.0;
  LownerOrder versus_conditional = LownerOrder::equal;
  bool tie_with_conditional = false;
  bool equivalent_to_conditional = false;  // only meaningful for ties
  double K = 0.0;
  int rank = 0;
};

struct DemoPoint {
  double theta = 0.0;
  Vec z;
  double J_conditional = 0.0;
  double J_closed_form = 0.0;  // z / (theta (1 + theta)) for the Poisson pair
  double J_I = 0.0;
  double fiber_mean = 0.0;     // max |E[psi | t]| of the conditional score
  bool conditional_regular = false;
  bool conditional_weakly_first = false;
  bool ties_equivalent = false;
  /// |psi/S|^2 expanded around the conditional score, max over regular members.
  double pythagoras_residual = 0.0;
  std::vector<DemoMember> members;
};

struct ConditioningDemoReport {
  std::string model;
  bool completeness_declared = false;
  bool passed = false;
  std::vector<DemoPoint> points;
};

/// Checks that the conditional score is weakly first in the battery. Battery member 0 must be the conditional score.
ConditioningDemoReport conditioning_optimality_demo(const FactorizedModel& fm,
                                                    const std::vector<double>& theta_grid,
                                                    const std::vector<Vec>& z_grid,
                                                    const std::vector<InferenceFn>& battery,
                                                    const Tolerances& tol = {});

}  // namespace semieff
