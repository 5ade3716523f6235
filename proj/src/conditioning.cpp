#include "semieff/conditioning.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "semieff/efficiency.hpp"
#include "semieff/errors.hpp"

namespace semieff {

namespace {

double log_poisson(double k, double rate) { return k * std::log(rate) - rate - std::lgamma(k + 1.0); }

Vec theta1(double t) { return Vec::Constant(1, t); }

// Node indices grouped by the value of the statistic.
std::map<double, std::vector<std::size_t>> fibers(const FactorizedModel& fm, const PointSet& nodes) {
  std::map<double, std::vector<std::size_t>> out;
  for (std::size_t i = 0; i < nodes.size(); ++i) out[fm.statistic(nodes[i])].push_back(i);
  return out;
}

}  // namespace

FactorizedModel poisson_pair_factorization() {
  FactorizedModel fm;
  fm.name = "poisson-pair";
  fm.base = poisson_pair_model();
  fm.statistic = [](Point x) { return x[0] + x[1]; };
  fm.log_f_t = [](Point x, double theta) {
    const double x1 = x[0], x2 = x[1], t = x1 + x2;
    const double pi = theta / (1.0 + theta);
    return std::lgamma(t + 1.0) - std::lgamma(x1 + 1.0) - std::lgamma(x2 + 1.0) +
           x2 * std::log(pi) + x1 * std::log1p(-pi);
  };
  fm.log_h = [](double t, double theta, const Vec& z) { return log_poisson(t, z[0] * (1.0 + theta)); };
  fm.completeness_declared = true;
  return fm;
}

FactorizationCheck verify_factorization(const FactorizedModel& fm, double theta, const Vec& z,
                                        const Tolerances& tol) {
  FactorizationCheck chk;
  const Vec th = theta1(theta);
  const auto scheme = fm.base->default_scheme(th, z);
  const auto& nodes = scheme->nodes();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double lp = fm.base->log_density(nodes[i], th, z);
    const double split = fm.log_f_t(nodes[i], theta) + fm.log_h(fm.statistic(nodes[i]), theta, z);
    chk.max_decomposition_error = std::max(chk.max_decomposition_error, std::abs(lp - split));
  }
  for (const auto& [t, idx] : fibers(fm, nodes)) {
    double mass = 0.0;
    for (auto i : idx) mass += scheme->measure_weights()[static_cast<Eigen::Index>(i)] *
                               std::exp(fm.log_f_t(nodes[i], theta));
    chk.max_fiber_mass_error = std::max(chk.max_fiber_mass_error, std::abs(mass - 1.0));
  }
  if (chk.max_fiber_mass_error > tol.mass) {
    std::ostringstream msg;
    msg << fm.name << ": conditional density does not normalise on a fiber (error "
        << chk.max_fiber_mass_error << ")";
    throw ModelError(msg.str());
  }
  if (chk.max_decomposition_error > 1e-10) {
    std::ostringstream msg;
    msg << fm.name << ": log p differs from log f_t + log h by " << chk.max_decomposition_error;
    throw ModelError(msg.str());
  }
  return chk;
}

InferenceFn conditional_score(const FactorizedModel& fm) {
  InferenceFn psi;
  psi.name = "conditional-score";
  psi.q = 1;
  auto log_f = fm.log_f_t;
  // Five-point stencil: the sensitivity differentiates psi once more, so the
  // central-difference rounding error would otherwise be squared.
  psi.eval = [log_f](Point x, const Vec& theta, const Vec&) {
    const double th = theta[0];
    double h = std::max(1.0, std::abs(th)) * 1e-3;
    if (th > 0.0) h = std::min(h, 0.25 * th);
    const double d = 8.0 * (log_f(x, th + h) - log_f(x, th - h)) -
                     (log_f(x, th + 2.0 * h) - log_f(x, th - 2.0 * h));
    return Vec::Constant(1, d / (12.0 * h));
  };
  return psi;
}

double max_fiber_mean(const InferenceFn& psi, const FactorizedModel& fm, double theta,
                      const Vec& z) {
  const Vec th = theta1(theta);
  const auto p = materialise(*fm.base, th, z, fm.base->default_scheme(th, z));
  const auto& nodes = p->scheme()->nodes();
  const Vec& pi = p->probabilities();
  double worst = 0.0;
  for (const auto& [t, idx] : fibers(fm, nodes)) {
    double num = 0.0, den = 0.0;
    for (auto i : idx) {
      const auto k = static_cast<Eigen::Index>(i);
      num += pi[k] * psi.eval(nodes[i], th, z)[0];
      den += pi[k];
    }
    if (den > 0.0) worst = std::max(worst, std::abs(num / den));
  }
  return worst;
}

DecompositionResidual decomposition_residual(const FactorizedModel& fm, double theta, const Vec& z,
                                             const std::vector<InferenceFn>& battery,
                                             const Tolerances& tol) {
  const Vec th = theta1(theta);
  const auto p = materialise(*fm.base, th, z, fm.base->default_scheme(th, z), tol.mass);
  const auto& nodes = p->scheme()->nodes();
  const InferenceFn psi = conditional_score(fm);
  DecompositionResidual d;
  d.psi = materialise_fn(psi, th, z, p).front();
  d.l = score(*fm.base, th, z, p).front();
  d.R = d.psi - d.A * d.l;
  const double h = fd_step(theta);
  std::map<double, std::pair<double, double>> range;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double t = fm.statistic(nodes[i]);
    const double expected = -(fm.log_h(t, theta + h, z) - fm.log_h(t, theta - h, z)) / (2.0 * h);
    const double r = d.R.values()[static_cast<Eigen::Index>(i)];
    d.R_formula_error = std::max(d.R_formula_error, std::abs(r - expected));
    auto [it, fresh] = range.try_emplace(t, r, r);
    if (!fresh) {
      it->second.first = std::min(it->second.first, r);
      it->second.second = std::max(it->second.second, r);
    }
  }
  for (const auto& [t, mm] : range) d.R_fiber_spread = std::max(d.R_fiber_spread, mm.second - mm.first);
  for (const auto& phi : battery)
    d.orthogonality.emplace_back(phi.name, inner_product(d.R, materialise_fn(phi, th, z, p).front()));
  d.score_sensitivity_ratio = inner_product(d.psi, d.l) / sensitivity(psi, th, z, p)(0, 0);
  return d;
}

std::vector<InferenceFn> conditioning_battery(const FactorizedModel& fm) {
  if (fm.base->sample_dim() != 2)
    throw ConfigError("the conditioning battery is defined for pair-valued models");
  const InferenceFn cs = conditional_score(fm);
  auto make = [](std::string name, bool quasi, std::function<double(double, double, double, double)> f) {
    InferenceFn psi;
    psi.name = std::move(name);
    psi.q = 1;
    psi.depends_on_nuisance = quasi;
    psi.eval = [f](Point x, const Vec& theta, const Vec& z) {
      return Vec::Constant(1, f(x[0], x[1], theta[0], z.size() ? z[0] : 0.0));
    };
    return psi;
  };
  auto frac = [](double th) { return th / (1.0 + th); };
  return {
      cs,
      scaled(cs, 2.0, "2*conditional-score"),
      make("x2-theta*x1", false, [](double x1, double x2, double th, double) { return x2 - th * x1; }),
      make("partial-score", true, [](double, double x2, double th, double z) { return x2 / th - z; }),
      make("fiber-centred-x2^2", false,
           [frac](double x1, double x2, double th, double) {
             const double t = x1 + x2, pi = frac(th);
             return x2 * x2 - t * pi * (1.0 - pi) - t * t * pi * pi;
           }),
      make("(x2-t*pi)*t", false,
           [frac](double x1, double x2, double th, double) {
             const double t = x1 + x2;
             return (x2 - t * frac(th)) * t;
           }),
      make("fiber-centred-x1*x2", false,
           [frac](double x1, double x2, double th, double) {
             const double t = x1 + x2, pi = frac(th);
             return x1 * x2 - t * (t - 1.0) * pi * (1.0 - pi);
           }),
      make("x2-theta*x1+t-z(1+theta)", true,
           [](double x1, double x2, double th, double z) {
             return (x2 - th * x1) + (x1 + x2 - z * (1.0 + th));
           }),
  };
}

ConditioningDemoReport conditioning_optimality_demo(const FactorizedModel& fm,
                                                    const std::vector<double>& theta_grid,
                                                    const std::vector<Vec>& z_grid,
                                                    const std::vector<InferenceFn>& battery,
                                                    const Tolerances& tol) {
  if (!fm.completeness_declared)
    throw PreconditionError(fm.name + ": completeness of the statistic is not declared");
  if (battery.empty()) throw ConfigError("conditioning demo needs a nonempty battery");
  ConditioningDemoReport rep;
  rep.model = fm.name;
  rep.completeness_declared = fm.completeness_declared;
  rep.passed = true;
  for (double theta : theta_grid)
    for (const auto& z : z_grid) {
      const Vec th = theta1(theta);
      verify_factorization(fm, theta, z, tol);
      const auto eff = efficiency_analysis(*fm.base, th, z, {}, tol);
      const auto& p = eff.fia.base;
      DemoPoint pt;
      pt.theta = theta;
      pt.z = z;
      pt.J_I = eff.J_I(0, 0);
      pt.J_closed_form = z[0] / (theta * (1.0 + theta));
      const auto psi_vals = materialise_fn(battery.front(), th, z, p);
      const double s_psi = sensitivity(battery.front(), th, z, p)(0, 0);
      Mat j_cond;
      for (std::size_t m = 0; m < battery.size(); ++m) {
        const auto& phi = battery[m];
        const auto g = godambe_information(phi, *fm.base, th, z, p, &eff.l_I, tol);
        DemoMember mem;
        mem.name = phi.name;
        mem.depends_on_nuisance = phi.depends_on_nuisance;
        mem.regular = g.regularity.passed();
        mem.J = g.J(0, 0);
        mem.J_ext = g.J_ext(0, 0);
        mem.fiber_mean = max_fiber_mean(phi, fm, theta, z);
        if (m == 0) {
          j_cond = g.J_ext;
          pt.J_conditional = mem.J;
          pt.conditional_regular = mem.regular;
          pt.fiber_mean = mem.fiber_mean;
        }
        mem.versus_conditional = lowner_compare(g.J_ext, j_cond, tol.lowner, tol.equiv);
        if (mem.versus_conditional == LownerOrder::equal) {
          mem.tie_with_conditional = true;
          const auto eq = equivalence_at(materialise_fn(phi, th, z, p), psi_vals, tol.equiv);
          mem.equivalent_to_conditional = eq.equivalent;
          mem.K = eq.K(0, 0);
        }
        if (mem.regular && !phi.depends_on_nuisance) {
          const double s_phi = sensitivity(phi, th, z, p)(0, 0);
          const L2Vec pt_phi = (1.0 / s_phi) * materialise_fn(phi, th, z, p).front();
          const L2Vec pt_psi = (1.0 / s_psi) * psi_vals.front();
          const double lhs = inner_product(pt_phi, pt_phi);
          const L2Vec diff = pt_phi - pt_psi;
          const double rhs = inner_product(diff, diff) + 2.0 * inner_product(pt_phi, pt_psi) -
                             inner_product(pt_psi, pt_psi);
          pt.pythagoras_residual = std::max(pt.pythagoras_residual, std::abs(lhs - rhs));
        }
        pt.members.push_back(std::move(mem));
      }
      pt.conditional_weakly_first = true;
      pt.ties_equivalent = true;
      for (auto& mem : pt.members) {
        if (mem.versus_conditional == LownerOrder::greater) pt.conditional_weakly_first = false;
        if (mem.tie_with_conditional && !mem.equivalent_to_conditional) pt.ties_equivalent = false;
        int above = 0;
        for (const auto& other : pt.members)
          if (other.J_ext > mem.J_ext &&
              lowner_compare(Mat::Constant(1, 1, other.J_ext), Mat::Constant(1, 1, mem.J_ext),
                             tol.lowner, tol.equiv) == LownerOrder::greater)
            ++above;
        mem.rank = 1 + above;
      }
      const bool ok = pt.conditional_regular && pt.fiber_mean < 1e-8 &&
                      std::abs(pt.J_conditional - pt.J_closed_form) < 1e-6 &&
                      pt.conditional_weakly_first && pt.ties_equivalent;
      rep.passed = rep.passed && ok;
      rep.points.push_back(std::move(pt));
    }
  return rep;
}

}  // namespace semieff
