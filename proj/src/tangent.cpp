#include "semieff/tangent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "semieff/errors.hpp"

namespace semieff {

std::vector<double> dyadic_grid(int k0, int k1) {
  if (k0 > k1) throw ConfigError("dyadic grid needs k0 <= k1");
  std::vector<double> ts;
  for (int k = k0; k <= k1; ++k) ts.push_back(std::ldexp(1.0, -k));
  return ts;
}

Vec PathSpec::density_at(std::size_t k) const {
  return base->values().cwiseProduct((increments[k].array() + 1.0).matrix());
}

Vec PathSpec::remainder(std::size_t k) const {
  return increments[k] / ts[k] - tangent.values();
}

namespace {

void check_grid(const std::vector<double>& ts) {
  if (ts.size() < 3) throw ConfigError("a path needs at least three grid values of t");
  for (std::size_t k = 0; k < ts.size(); ++k) {
    if (!(ts[k] > 0.0)) throw ConfigError("path grid values must be positive");
    if (k > 0 && !(ts[k] < ts[k - 1])) throw ConfigError("path grid must be strictly decreasing");
  }
}

void check_tangent(const DensityPtr& p, const L2Vec& nu, double tol_mass) {
  if (!nu.base() || !nu.base()->same_as(*p))
    throw ConfigError("claimed tangent lives on a different base density");
  const double m = expectation(nu);
  if (std::abs(m) > tol_mass) {
    std::ostringstream msg;
    msg << "tangent is not centered (mean " << m << ", tolerance " << tol_mass << ")";
    throw PreconditionError(msg.str());
  }
}

}  // namespace

PathSpec linear_path(const DensityPtr& p, const L2Vec& nu, std::vector<double> ts,
                     double tol_mass) {
  check_grid(ts);
  check_tangent(p, nu, tol_mass);
  const Vec& v = nu.values();
  if (!v.allFinite()) throw PreconditionError("tangent is not finite at every node");
  const double most_negative = v.minCoeff();
  const double t_max =
      most_negative < 0.0 ? -1.0 / most_negative : std::numeric_limits<double>::infinity();
  if (!(ts.front() < t_max)) {
    std::ostringstream msg;
    msg << "linear path leaves the positive cone: 1 + t nu <= 0 for t = " << ts.front()
        << "; shrink the grid below t = " << t_max;
    throw DomainError(msg.str());
  }
  PathSpec path{p, std::move(ts), {}, nu};
  for (double t : path.ts) path.increments.push_back(t * v);
  return path;
}

PathSpec path_from_densities(const DensityPtr& p, const L2Vec& nu, std::vector<double> ts,
                             const std::function<Vec(double)>& density_at, double tol_mass) {
  check_grid(ts);
  check_tangent(p, nu, tol_mass);
  PathSpec path{p, std::move(ts), {}, nu};
  for (double t : path.ts) {
    const auto pt = Density::materialise(p->scheme(), density_at(t), tol_mass);
    path.increments.push_back((pt->values().array() / p->values().array() - 1.0).matrix());
  }
  return path;
}

PathSpec model_path(const DensityModel& model, const Vec& theta, const Vec& z,
                    const Vec& dtheta, const Vec& dz, const DensityPtr& p, const L2Vec& nu,
                    std::vector<double> ts, double tol_mass) {
  const auto& nodes = p->scheme()->nodes();
  auto at = [&](double t) {
    const Vec th = theta + t * dtheta;
    const Vec zz = z + t * dz;
    model.check_parameters(th, zz);
    Vec v(static_cast<Eigen::Index>(nodes.size()));
    for (std::size_t i = 0; i < nodes.size(); ++i)
      v[static_cast<Eigen::Index>(i)] = model.density(nodes[i], th, zz);
    return v;
  };
  return path_from_densities(p, nu, std::move(ts), at, tol_mass);
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::converging: return "converging";
    case Verdict::not_converging: return "not-converging";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "unknown";
}

Verdict column_verdict(const std::vector<double>& values, double tol_path) {
  const std::size_t n = values.size();
  if (n < 3) return Verdict::inconclusive;
  const double a = values[n - 3], b = values[n - 2], c = values[n - 1];
  if (!std::isfinite(c)) return Verdict::not_converging;
  if (b <= a && c <= b && c < tol_path) return Verdict::converging;
  // Two halvings of t should shrink a convergent remainder well below 3/4.
  if (c >= tol_path && c > 0.75 * a) return Verdict::not_converging;
  return Verdict::inconclusive;
}

namespace {

double loglog_slope(const std::vector<DiagnosticsRow>& rows, double DiagnosticsRow::*col) {
  const std::size_t n = rows.size();
  const std::size_t m = std::min<std::size_t>(5, n);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = n - m; k < n; ++k) {
    const double v = rows[k].*col;
    if (!(v > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    const double x = std::log(rows[k].t), y = std::log(v);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double d = static_cast<double>(m) * sxx - sx * sx;
  return (static_cast<double>(m) * sxy - sx * sy) / d;
}

std::vector<double> column(const std::vector<DiagnosticsRow>& rows, double DiagnosticsRow::*col) {
  std::vector<double> out;
  for (const auto& r : rows) out.push_back(r.*col);
  return out;
}

}  // namespace

DiffDiagnostics diagnose_path(const PathSpec& path, const Tolerances& tol) {
  if (path.increments.size() != path.ts.size())
    throw ConfigError("path has a different number of densities and grid values");
  const Vec& pi = path.base->probabilities();
  const Vec& nu = path.tangent.values();
  DiffDiagnostics d;
  for (std::size_t k = 0; k < path.ts.size(); ++k) {
    const double t = path.ts[k];
    const Vec& inc = path.increments[k];
    if (((inc.array() + 1.0) <= 0.0).any() || !inc.allFinite()) {
      std::ostringstream msg;
      msg << "path density is nonpositive at a node for t = " << t;
      throw DomainError(msg.str());
    }
    const Vec r = path.remainder(k);
    const Vec absr = r.cwiseAbs();
    DiagnosticsRow row;
    row.t = t;
    row.l1 = pi.dot(absr);
    row.l2 = std::sqrt(pi.dot(absr.cwiseAbs2()));
    row.sup = absr.maxCoeff();
    for (Eigen::Index i = 0; i < r.size(); ++i) {
      if (t * absr[i] > 1.0)
        row.weak1 += pi[i] * absr[i];
      else
        row.weak2 += pi[i] * absr[i] * absr[i];
    }
    row.weak1 /= t;
    // sqrt(1 + inc) - 1 written to avoid cancellation for small increments.
    const Vec root_inc =
        (inc.array() / ((inc.array() + 1.0).sqrt() + 1.0)).matrix();
    const Vec s = root_inc / t - 0.5 * nu;
    row.hellinger_l2 = std::sqrt(pi.dot(s.cwiseAbs2()));
    row.mean_remainder = pi.dot(r);
    d.rows.push_back(row);
  }
  d.l1 = column_verdict(column(d.rows, &DiagnosticsRow::l1), tol.path);
  d.l2 = column_verdict(column(d.rows, &DiagnosticsRow::l2), tol.path);
  d.sup = column_verdict(column(d.rows, &DiagnosticsRow::sup), tol.path);
  const Verdict w1 = column_verdict(column(d.rows, &DiagnosticsRow::weak1), tol.path);
  const Verdict w2 = column_verdict(column(d.rows, &DiagnosticsRow::weak2), tol.path);
  if (w1 == Verdict::converging && w2 == Verdict::converging)
    d.weak = Verdict::converging;
  else if (w1 == Verdict::not_converging || w2 == Verdict::not_converging)
    d.weak = Verdict::not_converging;
  else
    d.weak = Verdict::inconclusive;
  d.hellinger = column_verdict(column(d.rows, &DiagnosticsRow::hellinger_l2), tol.path);

  // sup => L2 => weak => L1
  if (d.sup == Verdict::converging) d.l2 = Verdict::converging;
  if (d.l2 == Verdict::converging) d.weak = Verdict::converging;
  if (d.weak == Verdict::converging) d.l1 = Verdict::converging;

  d.slope_l1 = loglog_slope(d.rows, &DiagnosticsRow::l1);
  d.slope_l2 = loglog_slope(d.rows, &DiagnosticsRow::l2);
  d.slope_sup = loglog_slope(d.rows, &DiagnosticsRow::sup);
  d.slope_weak1 = loglog_slope(d.rows, &DiagnosticsRow::weak1);
  d.slope_weak2 = loglog_slope(d.rows, &DiagnosticsRow::weak2);
  d.slope_hellinger = loglog_slope(d.rows, &DiagnosticsRow::hellinger_l2);
  return d;
}

const char* to_string(ConeKind kind) {
  switch (kind) {
    case ConeKind::T1: return "T1";
    case ConeKind::T2: return "T2";
    case ConeKind::T3: return "T3";
  }
  return "unknown";
}

const Subspace& TangentCone::closed_span() const {
  if (kind == ConeKind::T1) return *score_span;
  return *sum_span;
}

TangentCone tangent_cone(const DensityModel& model, const Vec& theta, const Vec& z,
                         ConeKind kind, const DensityPtr& p) {
  TangentCone cone;
  cone.kind = kind;
  auto l = score(model, theta, z, p);
  try {
    cone.score_span.emplace(l);
  } catch (const NumericalError& e) {
    throw NumericalError(std::string("score span is rank deficient: ") + e.what());
  }
  if (kind == ConeKind::T1) return cone;
  auto nv = nuisance_vectors(model, theta, z, p);
  cone.nuisance_span.emplace(nv);
  std::vector<L2Vec> all = l;
  all.insert(all.end(), nv.begin(), nv.end());
  cone.sum_span.emplace(std::move(all));
  return cone;
}

}  // namespace semieff
