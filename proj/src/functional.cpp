#include "semieff/functional.hpp"

#include <cmath>
#include <sstream>

#include "semieff/errors.hpp"
#include "semieff/parallel.hpp"

namespace semieff {

namespace {

Vec coordinate_moment(const Density& p, int power) {
  const auto& nodes = p.scheme()->nodes();
  const Vec& pi = p.probabilities();
  double m = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i)
    m += pi[static_cast<Eigen::Index>(i)] * std::pow(nodes[i][0], power);
  return Vec::Constant(1, m);
}

std::vector<L2Vec> moment_gradient(const DensityPtr& p, int power) {
  const double m = coordinate_moment(*p, power)[0];
  return {L2Vec::from_function(p, [power, m](Point x) { return std::pow(x[0], power) - m; })};
}

}  // namespace

Functional mean_functional() {
  return {"mean", 1, [](const Density& p) { return coordinate_moment(p, 1); },
          [](const DensityPtr& p) { return moment_gradient(p, 1); }};
}

Functional second_moment_functional() {
  return {"second-moment", 1, [](const Density& p) { return coordinate_moment(p, 2); },
          [](const DensityPtr& p) { return moment_gradient(p, 2); }};
}

Functional compose(const Functional& phi, std::function<Vec(const Vec&)> g,
                   std::function<Mat(const Vec&)> g_jacobian, std::string name) {
  Functional out;
  out.name = std::move(name);
  out.dim = static_cast<int>(g(Vec::Zero(phi.dim)).size());
  auto inner = phi.eval;
  out.eval = [inner, g](const Density& p) { return g(inner(p)); };
  if (phi.candidate_gradient) {
    auto grad = phi.candidate_gradient;
    out.candidate_gradient = [inner, grad, g_jacobian](const DensityPtr& p) {
      return chain_rule(grad(p), g_jacobian(inner(*p)));
    };
  }
  return out;
}

Mat covariance(const std::vector<L2Vec>& f) { return inner_products(f, f); }

std::vector<L2Vec> canonical_gradient(const std::vector<L2Vec>& grad, const Subspace& cone_span) {
  std::vector<L2Vec> out;
  for (const auto& g : grad) out.push_back(project(g, cone_span));
  return out;
}

std::vector<L2Vec> chain_rule(const std::vector<L2Vec>& grad, const Mat& g_jacobian) {
  if (g_jacobian.cols() != static_cast<Eigen::Index>(grad.size()))
    throw ConfigError("chain rule: Jacobian columns do not match the gradient dimension");
  if (!g_jacobian.allFinite()) throw ConfigError("chain rule: Jacobian is not finite");
  std::vector<L2Vec> out;
  for (Eigen::Index i = 0; i < g_jacobian.rows(); ++i) {
    L2Vec acc = L2Vec::zero(grad.front().base());
    for (Eigen::Index j = 0; j < g_jacobian.cols(); ++j)
      acc += g_jacobian(i, j) * grad[static_cast<std::size_t>(j)];
    out.push_back(std::move(acc));
  }
  return out;
}

GradientResult verify_gradient(const Functional& phi, const DensityPtr& p, const Subspace& cone,
                               const std::vector<L2Vec>& grad, const Tolerances& tol,
                               const std::vector<double>& ts) {
  if (static_cast<int>(grad.size()) != phi.dim)
    throw ConfigError("gradient has " + std::to_string(grad.size()) + " components, functional " +
                      std::to_string(phi.dim));
  for (const auto& g : grad) require_same_base(cone.basis(0), g);
  GradientResult res;
  res.gradient = grad;
  res.canonical = canonical_gradient(grad, cone);
  res.cov_gradient = covariance(grad);
  res.cov_canonical = covariance(res.canonical);
  const Vec phi0 = phi.eval(*p);
  const auto& scheme = p->scheme();
  std::vector<std::vector<DirectionalResidual>> per_dir(static_cast<std::size_t>(cone.dim()));
  parallel_for(per_dir.size(), [&](std::size_t d) {
    const L2Vec& nu = cone.basis(static_cast<int>(d));
    const double neg = nu.values().minCoeff();
    std::vector<double> feasible;
    for (double t : ts)
      if (neg >= 0.0 || 1.0 + t * neg > 0.0) feasible.push_back(t);
    auto& rows = per_dir[d];
    if (feasible.size() < 2) {
      for (int c = 0; c < phi.dim; ++c) {
        DirectionalResidual r;
        r.direction = static_cast<int>(d);
        r.component = c;
        r.feasible = false;
        r.note = "linear path infeasible on the grid (1 + t nu <= 0)";
        rows.push_back(r);
      }
      return;
    }
    const double t_small = feasible[feasible.size() - 1];
    const double t_large = feasible[feasible.size() - 2];
    auto quotient = [&](double t) {
      const Vec pt = p->values().cwiseProduct((1.0 + t * nu.values().array()).matrix());
      const auto dens = Density::materialise(scheme, pt, tol.mass);
      return Vec((phi.eval(*dens) - phi0) / t);
    };
    const Vec d_small = quotient(t_small), d_large = quotient(t_large);
    // Richardson for a ratio of two: 2 D(t/2) - D(t); general ratio otherwise.
    const double ratio = t_large / t_small;
    const Vec slope = (ratio * d_small - d_large) / (ratio - 1.0);
    for (int c = 0; c < phi.dim; ++c) {
      DirectionalResidual r;
      r.direction = static_cast<int>(d);
      r.component = c;
      r.slope = slope[c];
      r.predicted = inner_product(grad[static_cast<std::size_t>(c)], nu);
      r.residual = std::abs(r.slope - r.predicted);
      rows.push_back(r);
    }
  });
  res.passed = true;
  for (auto& rows : per_dir)
    for (auto& r : rows) {
      if (r.feasible) {
        res.max_residual = std::max(res.max_residual, r.residual);
        if (!(r.residual < tol.grad)) res.passed = false;
      }
      res.residuals.push_back(std::move(r));
    }
  return res;
}

std::uint64_t replication_seed(std::uint64_t seed, std::uint64_t rep) {
  // splitmix64 of the pair
  std::uint64_t x = seed ^ (0x9E3779B97F4A7C15ULL * (rep + 1));
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

InfluenceReport influence_to_estimator_check(const std::function<Vec(Point)>& influence,
                                             const DensityModel& model, const Vec& theta,
                                             const Vec& z, std::size_t n, std::size_t reps,
                                             std::uint64_t seed) {
  if (n < 1) throw ConfigError("influence check needs n >= 1");
  if (reps < 100) throw ConfigError("influence check needs reps >= 100");
  InfluenceReport rep;
  rep.n = n;
  rep.reps = reps;
  rep.seed = seed;
  const auto p = materialise(model, theta, z, model.default_scheme(theta, z));
  std::vector<L2Vec> ic;
  {
    const auto& nodes = p->scheme()->nodes();
    const int q = static_cast<int>(influence(nodes[0]).size());
    std::vector<Vec> comps(static_cast<std::size_t>(q), Vec(static_cast<Eigen::Index>(nodes.size())));
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const Vec v = influence(nodes[i]);
      for (int c = 0; c < q; ++c) comps[static_cast<std::size_t>(c)][static_cast<Eigen::Index>(i)] = v[c];
    }
    for (auto& c : comps) ic.emplace_back(p, std::move(c));
  }
  rep.target_cov = covariance(ic);
  const auto q = static_cast<Eigen::Index>(ic.size());
  std::vector<Vec> draws(reps);
  parallel_for(reps, [&](std::size_t r) {
    const PointSet xs = model.sample(theta, z, replication_seed(seed, r), n);
    Vec mean = Vec::Zero(q);
    for (std::size_t i = 0; i < xs.size(); ++i) mean += influence(xs[i]);
    draws[r] = std::sqrt(static_cast<double>(n)) * mean / static_cast<double>(n);
  });
  Vec avg = Vec::Zero(q);
  for (const auto& d : draws) avg += d;
  avg /= static_cast<double>(reps);
  rep.empirical_cov = Mat::Zero(q, q);
  for (const auto& d : draws) rep.empirical_cov += (d - avg) * (d - avg).transpose();
  rep.empirical_cov /= static_cast<double>(reps - 1);
  rep.relative_error = (rep.empirical_cov - rep.target_cov).norm() / rep.target_cov.norm();
  return rep;
}

}  // namespace semieff
