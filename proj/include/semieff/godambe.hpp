#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "semieff/linalg.hpp"
#include "semieff/measure.hpp"
#include "semieff/model.hpp"
#include "semieff/tolerances.hpp"

namespace semieff {

/// Estimating function psi(x; theta[, z]) with values in R^q.
struct InferenceFn {
  std::string name;
  int q = 1;
  std::function<Vec(Point, const Vec& theta, const Vec& z)> eval;
  bool depends_on_nuisance = false;
};

/// The model's partial score as a (quasi-)inference function.
InferenceFn score_function(ModelPtr model);
/// c * psi.
InferenceFn scaled(const InferenceFn& psi, double c, std::string name = {});
/// Linear map K psi.
InferenceFn transformed(const InferenceFn& psi, const Mat& k, std::string name);

/// Components of psi at the nodes of p (uncentered).
std::vector<L2Vec> materialise_fn(const InferenceFn& psi, const Vec& theta, const Vec& z,
                                  const DensityPtr& p);

/// S(i, j) = E[d psi_i / d theta_j], central differences pointwise.
Mat sensitivity(const InferenceFn& psi, const Vec& theta, const Vec& z, const DensityPtr& p);

struct RegularityCheck {
  std::string condition;
  bool passed = false;
  double value = 0.0;
  double threshold = 0.0;
};

struct RegularityRecord {
  std::vector<RegularityCheck> checks;
  bool passed() const;
  const RegularityCheck& get(const std::string& condition) const;
};

/// Conditions "centred" (mean zero, finite norm), "interchange" (d/dtheta
/// passes under the integral), "nonsingular-S" and "positive-V". Failures are
/// recorded, never thrown.
RegularityRecord check_regularity(const InferenceFn& psi, const DensityModel& model,
                                  const Vec& theta, const Vec& z, const DensityPtr& p,
                                  const Tolerances& tol = {});

struct GodambeReport {
  std::string name;
  Mat S, V, J;
  bool has_extended = false;
  Mat S_ext, J_ext;
  /// max |S_ext - S| / max(1, |S|).
  double s_ext_deviation = 0.0;
  RegularityRecord regularity;
};

/// S, V, J = S V^-1 S^T; with l_I given also the extended sensitivity
/// S_ext(i, j) = -<psi_i^I, l_j^I> and J_ext. Throws NumericalError for a
/// singular V.
GodambeReport godambe_information(const InferenceFn& psi, const DensityModel& model,
                                  const Vec& theta, const Vec& z, const DensityPtr& p,
                                  const std::vector<L2Vec>* l_I = nullptr,
                                  const Tolerances& tol = {});

struct EquivalencePoint {
  Vec theta;
  Vec z;
  Mat K;
  double residual = 0.0;  // relative least-squares residual
  bool full_rank = false;
  bool equivalent = false;
  double J_gap = 0.0;  // max |J_psi - J_phi| where both are defined
};

struct EquivalenceResult {
  bool equivalent = false;
  std::vector<EquivalencePoint> points;
};

/// K minimising E|psi - K phi|^2 on vectors already materialised on one density.
EquivalencePoint equivalence_at(const std::vector<L2Vec>& psi, const std::vector<L2Vec>& phi,
                                double tol_equiv);

/// Equivalence psi = K(theta, z) phi at every grid point, each on the model's
/// default scheme.
EquivalenceResult equivalence_check(const InferenceFn& psi, const InferenceFn& phi,
                                    const DensityModel& model, const std::vector<Vec>& theta_grid,
                                    const std::vector<Vec>& z_grid, const Tolerances& tol = {});

struct Decomposition {
  std::vector<L2Vec> psi_I;
  std::vector<L2Vec> psi_A;
};

/// psi = psi_I + psi_A with psi_I the projection onto E = span{l_I}.
Decomposition decompose(const std::vector<L2Vec>& psi, const Subspace& e_span);

struct BatteryEntry {
  std::string name;
  GodambeReport report;
  Mat J_psi_I;          // Godambe information of psi^I (extended)
  double min_eig_gap;   // smallest eigenvalue of J_psi_I - J_ext
  EquivalencePoint equivalence_to_l_I;
  int dominated_by = 0;  // candidates strictly above it in the Loewner order
  int rank = 0;          // 1 + dominated_by
};

struct BatteryReport {
  Vec theta;
  Vec z;
  Mat J_l_I;
  std::vector<BatteryEntry> entries;
  /// order[i][j] compares J_ext of entry i with entry j.
  std::vector<std::vector<LownerOrder>> order;
};

/// Ranks candidates by the Loewner order of their (extended) Godambe
/// information at (theta, z) and checks J_psi <= J_{psi^I} = J_{l_I} and
/// psi^I ~ l_I for each.
BatteryReport optimality_battery(const std::vector<InferenceFn>& candidates,
                                 const DensityModel& model, const Vec& theta, const Vec& z,
                                 const DensityPtr& p, const std::vector<L2Vec>& l_I,
                                 const Tolerances& tol = {});

/// The eight odd estimating functions of the location battery for the
/// normal-mean model: x-theta, 3(x-theta), (x-theta)^3, tanh, pseudo-Huber(1.345),
/// sin, Cauchy score u/(1+u^2), atan.
std::vector<InferenceFn> location_battery();

}  // namespace semieff
