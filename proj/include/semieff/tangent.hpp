#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "semieff/measure.hpp"
#include "semieff/model.hpp"
#include "semieff/tolerances.hpp"

namespace semieff {

/// Dyadic grid {2^-k : k = k0..k1}, decreasing.
std::vector<double> dyadic_grid(int k0 = 3, int k1 = 16);

/// A path {p_t} through p on a fixed scheme with a claimed tangent nu.
///
/// Each p_t is stored through its relative increment (p_t - p) / p at the
/// nodes, so that r_t = increment / t - nu is evaluated without cancellation.
struct PathSpec {
  DensityPtr base;
  std::vector<double> ts;
  std::vector<Vec> increments;
  L2Vec tangent;

  Vec density_at(std::size_t k) const;
  /// r_t at grid index k.
  Vec remainder(std::size_t k) const;
};

/// p_t = p (1 + t nu). nu must be centered; throws DomainError reporting the
/// largest feasible t when 1 + t nu <= 0 at a node for some grid t.
PathSpec linear_path(const DensityPtr& p, const L2Vec& nu,
                     std::vector<double> ts = dyadic_grid(),
                     double tol_mass = Tolerances{}.mass);

/// Path from raw density values at each grid t (renormalised like any
/// materialised density).
PathSpec path_from_densities(const DensityPtr& p, const L2Vec& nu, std::vector<double> ts,
                             const std::function<Vec(double)>& density_at,
                             double tol_mass = Tolerances{}.mass);

/// Parametric path t -> p(.; theta + t*dtheta, z + t*dz) of a model.
PathSpec model_path(const DensityModel& model, const Vec& theta, const Vec& z,
                    const Vec& dtheta, const Vec& dz, const DensityPtr& p, const L2Vec& nu,
                    std::vector<double> ts = dyadic_grid(),
                    double tol_mass = Tolerances{}.mass);

enum class Verdict { converging, not_converging, inconclusive };
const char* to_string(Verdict v);

struct DiagnosticsRow {
  double t = 0.0;
  double l1 = 0.0;
  double l2 = 0.0;
  double sup = 0.0;  // also the essential-differentiability trace
  double weak1 = 0.0;
  double weak2 = 0.0;
  double hellinger_l2 = 0.0;
  double mean_remainder = 0.0;  // integral of r_t p
};

struct DiffDiagnostics {
  std::vector<DiagnosticsRow> rows;
  Verdict l1 = Verdict::inconclusive;
  Verdict l2 = Verdict::inconclusive;
  Verdict sup = Verdict::inconclusive;
  Verdict weak = Verdict::inconclusive;
  Verdict hellinger = Verdict::inconclusive;
  /// Least-squares log-log slopes over the last five grid points; NaN when a
  /// value is zero.
  double slope_l1 = 0.0, slope_l2 = 0.0, slope_sup = 0.0, slope_weak1 = 0.0,
         slope_weak2 = 0.0, slope_hellinger = 0.0;
};

/// Verdict for a column of remainder norms ordered by decreasing t.
Verdict column_verdict(const std::vector<double>& values, double tol_path);

DiffDiagnostics diagnose_path(const PathSpec& path, const Tolerances& tol = {});

enum class ConeKind { T1, T2, T3 };
const char* to_string(ConeKind kind);

/// T1 = span of the score; T2 keeps score and nuisance spans apart (a union,
/// not a vector space); T3 = span of both together.
struct TangentCone {
  ConeKind kind = ConeKind::T1;
  std::optional<Subspace> score_span;
  std::optional<Subspace> nuisance_span;
  std::optional<Subspace> sum_span;

  /// Closed linear span of the cone (score span for T1, sum span otherwise).
  const Subspace& closed_span() const;
};

TangentCone tangent_cone(const DensityModel& model, const Vec& theta, const Vec& z,
                         ConeKind kind, const DensityPtr& p);

}  // namespace semieff
