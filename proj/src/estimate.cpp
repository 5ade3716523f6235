#include "semieff/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "semieff/efficiency.hpp"
#include "semieff/errors.hpp"
#include "semieff/functional.hpp"
#include "semieff/linalg.hpp"
#include "semieff/parallel.hpp"

namespace semieff {

namespace {

Vec mean_psi(const InferenceFn& psi, const PointSet& sample, const Vec& theta, const Vec& z) {
  Vec acc = Vec::Zero(psi.q);
  for (std::size_t i = 0; i < sample.size(); ++i) acc += psi.eval(sample[i], theta, z);
  return acc / static_cast<double>(sample.size());
}

double residual_of(const Vec& f) {
  return f.allFinite() ? f.norm() : std::numeric_limits<double>::infinity();
}

Mat fd_jacobian(const InferenceFn& psi, const PointSet& sample, const Vec& theta, const Vec& z) {
  Mat jac(psi.q, theta.size());
  for (Eigen::Index j = 0; j < theta.size(); ++j) {
    const double h = fd_step(theta[j]);
    Vec tp = theta, tm = theta;
    tp[j] += h;
    tm[j] -= h;
    jac.col(j) = (mean_psi(psi, sample, tp, z) - mean_psi(psi, sample, tm, z)) / (2.0 * h);
  }
  return jac;
}

// Scalar root by bracketing outward from theta, then bisection.
bool bisection(const InferenceFn& psi, const PointSet& sample, const Vec& z, double tol,
               SolveTrace& trace) {
  const double start = trace.theta_hat[0];
  auto f = [&](double t) { return mean_psi(psi, sample, Vec::Constant(1, t), z)[0]; };
  const double f0 = f(start);
  if (!std::isfinite(f0)) return false;
  double d = 0.1 * std::max(1.0, std::abs(start));
  double a = start, b = start, fa = f0, fb = f0;
  bool found = false;
  for (int k = 0; k < 60 && !found; ++k, d *= 2.0) {
    for (double cand : {start - d, start + d}) {
      const double fc = f(cand);
      if (std::isfinite(fc) && fc * f0 <= 0.0) {
        a = std::min(start, cand);
        b = std::max(start, cand);
        fa = cand < start ? fc : f0;
        fb = cand < start ? f0 : fc;
        found = true;
        break;
      }
    }
  }
  if (!found) return false;
  trace.method = "bisection";
  for (int it = 0; it < 200; ++it) {
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    trace.iterates.push_back({Vec::Constant(1, m), std::abs(fm), 0.5});
    if (std::abs(fm) < tol || b - a <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(m))) {
      trace.theta_hat = Vec::Constant(1, m);
      return std::abs(fm) < tol;
    }
    if ((fm < 0.0) == (fa < 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
      fb = fm;
    }
  }
  (void)fb;
  return false;
}

}  // namespace

SolveTrace solve(const InferenceFn& psi, const PointSet& sample, const Vec& theta_init,
                 const Vec& z, const SolveOptions& opts) {
  if (sample.empty()) throw ConfigError("solve: the sample is empty");
  if (theta_init.size() != psi.q)
    throw ConfigError("solve: theta_init has the wrong dimension for " + psi.name);
  const double tol = opts.tol_root * psi.q;
  SolveTrace trace;
  Vec theta = theta_init;
  Vec f = mean_psi(psi, sample, theta, z);
  double res = residual_of(f);
  trace.iterates.push_back({theta, res, 0.0});
  bool stalled = !std::isfinite(res);
  for (int it = 0; it < opts.max_iter && !stalled; ++it) {
    if (res < tol) {
      trace.converged = true;
      break;
    }
    const Mat jac = fd_jacobian(psi, sample, theta, z);
    const Vec delta = jac.colPivHouseholderQr().solve(-f);
    if (!delta.allFinite()) {
      stalled = true;
      break;
    }
    double lambda = 1.0;
    bool accepted = false;
    for (int h = 0; h <= opts.max_halvings; ++h, lambda *= 0.5) {
      const Vec cand = theta + lambda * delta;
      const Vec fc = mean_psi(psi, sample, cand, z);
      const double rc = residual_of(fc);
      if (rc < res) {
        theta = cand;
        f = fc;
        res = rc;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      stalled = true;
      break;
    }
    trace.iterates.push_back({theta, res, lambda});
  }
  if (!trace.converged && res < tol) trace.converged = true;
  trace.theta_hat = theta;
  if (!trace.converged && psi.q == 1) trace.converged = bisection(psi, sample, z, tol, trace);
  trace.jacobian = fd_jacobian(psi, sample, trace.theta_hat, z);
  return trace;
}

McReport mc_study(const InferenceFn& psi, const DensityModel& model, const Vec& theta0,
                  const Vec& z0, std::size_t n, std::size_t reps, std::uint64_t seed,
                  const SolveOptions& opts) {
  if (n < 1) throw ConfigError("mc: n must be >= 1");
  if (reps < 100) throw ConfigError("mc: reps must be >= 100");
  model.check_parameters(theta0, z0);
  McReport rep;
  rep.n = n;
  rep.reps = reps;
  rep.seed = seed;
  rep.theta0 = theta0;
  rep.z0 = z0;

  const auto p = materialise(model, theta0, z0, model.default_scheme(theta0, z0));
  const auto g = godambe_information(psi, model, theta0, z0, p);
  rep.target_J_inv = spd_inverse(g.J, "Godambe information of " + psi.name);
  const auto es = efficient_score(model, theta0, z0, p);
  rep.semiparametric_bound =
      es.singular ? Mat::Constant(psi.q, psi.q, std::numeric_limits<double>::infinity())
                  : spd_inverse(es.J_E, "efficient information J_E");

  Vec init = theta0;
  for (Eigen::Index j = 0; j < init.size(); ++j) init[j] += 0.05 * std::max(1.0, std::abs(theta0[j]));

  rep.estimates.assign(reps, Vec());
  rep.converged.assign(reps, false);
  parallel_for(reps, [&](std::size_t r) {
    const PointSet xs = model.sample(theta0, z0, replication_seed(seed, r), n);
    try {
      const auto tr = solve(psi, xs, init, z0, opts);
      if (tr.converged) {
        rep.estimates[r] = tr.theta_hat;
        rep.converged[r] = true;
      }
    } catch (const Error&) {
    }
  });

  const auto q = static_cast<Eigen::Index>(psi.q);
  std::vector<Vec> scaled;
  std::vector<double> abs_err;
  for (std::size_t r = 0; r < reps; ++r) {
    if (!rep.converged[r]) {
      ++rep.failures;
      continue;
    }
    scaled.push_back(std::sqrt(static_cast<double>(n)) * (rep.estimates[r] - theta0));
    abs_err.push_back((rep.estimates[r] - theta0).norm());
  }
  rep.valid = rep.failures * 20 <= reps && scaled.size() >= 2;
  rep.empirical_cov = Mat::Zero(q, q);
  if (scaled.size() >= 2) {
    Vec mean = Vec::Zero(q);
    for (const auto& s : scaled) mean += s;
    mean /= static_cast<double>(scaled.size());
    for (const auto& s : scaled) rep.empirical_cov += (s - mean) * (s - mean).transpose();
    rep.empirical_cov /= static_cast<double>(scaled.size() - 1);
  }
  rep.deviation_from_target =
      (rep.empirical_cov - rep.target_J_inv).norm() / rep.target_J_inv.norm();
  rep.ratio_to_bound = rep.empirical_cov.trace() / rep.semiparametric_bound.trace();
  if (!abs_err.empty()) {
    auto mid = abs_err.begin() + static_cast<std::ptrdiff_t>(abs_err.size() / 2);
    std::nth_element(abs_err.begin(), mid, abs_err.end());
    rep.median_abs_error = *mid;
  }
  return rep;
}

}  // namespace semieff
