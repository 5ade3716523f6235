#pragma once

#include <string>
#include <vector>

#include "semieff/measure.hpp"
#include "semieff/model.hpp"
#include "semieff/tolerances.hpp"

namespace semieff {

enum class TransportKind { m, e };
const char* to_string(TransportKind kind);

struct TransportedVec {
  L2Vec value;
  Vec origin_z;
  Vec destination_z;
  TransportKind kind = TransportKind::m;
};

/// (p / p*) a, living on the destination density p*. Both densities must sit
/// on the same scheme.
L2Vec m_transport(const L2Vec& a, const DensityPtr& destination);
/// a - E*[a], living on the destination density p*.
L2Vec e_transport(const L2Vec& a, const DensityPtr& destination);

/// Model-level transports from z to z*. `a` must live on p(.; theta, z).
TransportedVec m_transport(const L2Vec& a, const DensityModel& model, const Vec& theta,
                           const Vec& z, const Vec& z_star, double tol_mass = Tolerances{}.mass);
TransportedVec e_transport(const L2Vec& a, const DensityModel& model, const Vec& theta,
                           const Vec& z, const Vec& z_star, double tol_mass = Tolerances{}.mass);

struct EfficientScore {
  std::vector<L2Vec> l;
  std::vector<L2Vec> l_E;
  Mat J_E;
  /// J_E has an eigenvalue below 1e-10 times the largest eigenvalue of Cov(l).
  bool singular = false;
};

/// l_E = l - Pi(l | T_N(theta, z)).
EfficientScore efficient_score(const DensityModel& model, const Vec& theta, const Vec& z,
                               const DensityPtr& p, double ridge = 0.0);

/// Fixed functions of x from which ambient spaces are built: Hermite
/// polynomials (univariate, degree <= 8) or monomials (pairs, total degree
/// <= 4) standardised under the middle grid value, plus the score and the
/// nuisance dictionary at every grid value.
struct AmbientDictionary {
  std::vector<ScalarFn> functions;
  std::vector<std::string> labels;
};

AmbientDictionary default_ambient_dictionary(const DensityModel& model, const Vec& theta,
                                             const std::vector<Vec>& z_grid,
                                             const SchemePtr& scheme);

/// Dictionary recentred under p and orthonormalised (rank revealing).
std::vector<L2Vec> materialise_ambient(const AmbientDictionary& dict, const DensityPtr& p);

struct FiaResult {
  Vec z_ref;
  std::vector<Vec> z_grid;
  std::vector<L2Vec> ambient;      // orthonormal, on p(.; theta, z_ref)
  std::vector<L2Vec> constraints;  // m-transported nuisance vectors
  std::vector<L2Vec> basis;        // orthonormal basis of F_IA (may be empty)
  int constraint_rank = 0;
  /// Relative residual of each constraint vector outside the ambient span.
  Vec constraint_residuals;
  DensityPtr base;

  int dim() const { return static_cast<int>(basis.size()); }
};

/// Complement, inside the ambient, of the m-transported nuisance dictionaries
/// for every z* in the grid (z_ref is always added). Throws ConfigError when
/// the score at z_ref is not inside the ambient.
FiaResult fia_space(const DensityModel& model, const Vec& theta, const Vec& z_ref,
                    std::vector<Vec> z_grid, const DensityPtr& p_ref,
                    const std::vector<L2Vec>& ambient, const Tolerances& tol = {});

struct InformationScore {
  std::vector<L2Vec> l_I;
  Mat J_I;
};

/// l_I = Pi(l | F_IA).
InformationScore information_score(const std::vector<L2Vec>& l, const FiaResult& fia);

/// F_IA carried to p(.; theta, z) by e-transport.
std::vector<L2Vec> transport_fia(const FiaResult& fia, const DensityPtr& destination);

struct AngleRow {
  Vec z;
  Vec cosines;
  double deviation = 0.0;  // 1 - smallest cosine
};

struct Attainability {
  bool attainable = false;
  double worst_deviation = 0.0;
  Vec worst_z;
  std::vector<AngleRow> rows;
};

/// For every z in the grid: does span{l_E(theta, z)} lie in the e-transported
/// F_IA? Verdict is relative to the grid.
Attainability attainability_check(const DensityModel& model, const Vec& theta,
                                  const FiaResult& fia, const Tolerances& tol = {});

struct EfficiencyReport {
  Vec theta;
  Vec z_ref;
  std::vector<Vec> z_grid;
  std::vector<L2Vec> l, l_E, l_I;
  Mat J_E, J_I;
  bool J_E_singular = false;
  FiaResult fia;
  Attainability attainability;
  double min_eig_JE_minus_JI = 0.0;
  /// |<J_I^-1 l_I, nu>| over the nuisance dictionary at z_ref.
  double gradient_orthogonality = 0.0;
  /// max |<J_I^-1 l_I, l^T> - I|.
  double gradient_identity = 0.0;
  int ambient_dim = 0;
};

/// Full pipeline on the model's default scheme for the grid. An empty grid
/// means model.default_z_grid(z_ref).
EfficiencyReport efficiency_analysis(const DensityModel& model, const Vec& theta,
                                     const Vec& z_ref, std::vector<Vec> z_grid = {},
                                     const Tolerances& tol = {});

}  // namespace semieff
