#include "semieff/godambe.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "semieff/errors.hpp"

namespace semieff {

InferenceFn score_function(ModelPtr model) {
  InferenceFn f;
  f.name = "score";
  f.q = model->theta_dim();
  f.eval = [model](Point x, const Vec& theta, const Vec& z) {
    return model->interest_score(x, theta, z);
  };
  f.depends_on_nuisance = true;
  return f;
}

InferenceFn scaled(const InferenceFn& psi, double c, std::string name) {
  InferenceFn f = psi;
  if (name.empty()) {
    std::ostringstream n;
    n << c << "*" << psi.name;
    name = n.str();
  }
  f.name = std::move(name);
  auto inner = psi.eval;
  f.eval = [inner, c](Point x, const Vec& theta, const Vec& z) { return Vec(c * inner(x, theta, z)); };
  return f;
}

InferenceFn transformed(const InferenceFn& psi, const Mat& k, std::string name) {
  if (k.cols() != psi.q) throw ConfigError("transformed: K has the wrong number of columns");
  InferenceFn f = psi;
  f.name = std::move(name);
  f.q = static_cast<int>(k.rows());
  auto inner = psi.eval;
  f.eval = [inner, k](Point x, const Vec& theta, const Vec& z) { return Vec(k * inner(x, theta, z)); };
  return f;
}

std::vector<L2Vec> materialise_fn(const InferenceFn& psi, const Vec& theta, const Vec& z,
                                  const DensityPtr& p) {
  const auto& nodes = p->scheme()->nodes();
  const auto n = static_cast<Eigen::Index>(nodes.size());
  Mat vals(n, psi.q);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vec v = psi.eval(nodes[static_cast<std::size_t>(i)], theta, z);
    if (v.size() != psi.q)
      throw ConfigError(psi.name + ": returned " + std::to_string(v.size()) +
                        " components, expected " + std::to_string(psi.q));
    vals.row(i) = v.transpose();
  }
  std::vector<L2Vec> out;
  for (int c = 0; c < psi.q; ++c) out.emplace_back(p, vals.col(c));
  return out;
}

Mat sensitivity(const InferenceFn& psi, const Vec& theta, const Vec& z, const DensityPtr& p) {
  const auto& nodes = p->scheme()->nodes();
  const Vec& pi = p->probabilities();
  Mat s = Mat::Zero(psi.q, theta.size());
  for (Eigen::Index j = 0; j < theta.size(); ++j) {
    const double h = fd_step(theta[j]);
    Vec tp = theta, tm = theta;
    tp[j] += h;
    tm[j] -= h;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const Vec d = (psi.eval(nodes[i], tp, z) - psi.eval(nodes[i], tm, z)) / (2.0 * h);
      s.col(j) += pi[static_cast<Eigen::Index>(i)] * d;
    }
  }
  return s;
}

bool RegularityRecord::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

const RegularityCheck& RegularityRecord::get(const std::string& condition) const {
  for (const auto& c : checks)
    if (c.condition == condition) return c;
  throw ConfigError("no regularity condition named " + condition);
}

RegularityRecord check_regularity(const InferenceFn& psi, const DensityModel& model,
                                  const Vec& theta, const Vec& z, const DensityPtr& p,
                                  const Tolerances& tol) {
  RegularityRecord rec;
  const auto vals = materialise_fn(psi, theta, z, p);
  const auto l = score(model, theta, z, p);
  const int q = psi.q;

  double worst_mean = 0.0;
  bool finite = true;
  std::vector<double> norms;
  for (const auto& v : vals) {
    finite = finite && v.values().allFinite();
    worst_mean = std::max(worst_mean, std::abs(expectation(v)));
    norms.push_back(norm(v));
  }
  rec.checks.push_back({"centred", finite && worst_mean < tol.mass, worst_mean, tol.mass});

  const Mat s = sensitivity(psi, theta, z, p);
  const Mat psi_l = inner_products(vals, l);
  double worst_rel = 0.0;
  try {
    for (Eigen::Index j = 0; j < theta.size(); ++j) {
      const double h = fd_step(theta[j]);
      Vec tp = theta, tm = theta;
      tp[j] += h;
      tm[j] -= h;
      const auto pp = materialise(model, tp, z, p->scheme(), tol.mass);
      const auto pm = materialise(model, tm, z, p->scheme(), tol.mass);
      const auto vp = materialise_fn(psi, tp, z, pp);
      const auto vm = materialise_fn(psi, tm, z, pm);
      for (int i = 0; i < q; ++i) {
        const double lhs = (expectation(vp[static_cast<std::size_t>(i)]) -
                            expectation(vm[static_cast<std::size_t>(i)])) / (2.0 * h);
        const double rhs = s(i, j) + psi_l(i, j);
        const double scale = std::abs(s(i, j)) + norms[static_cast<std::size_t>(i)] *
                                                     norm(l[static_cast<std::size_t>(j)]);
        const double rel = std::abs(lhs - rhs) / std::max(scale, 1e-300);
        worst_rel = std::max(worst_rel, rel);
      }
    }
  } catch (const Error&) {
    worst_rel = std::numeric_limits<double>::infinity();
  }
  rec.checks.push_back({"interchange", std::isfinite(worst_rel) && worst_rel < 1e-4, worst_rel, 1e-4});

  double scale = 1.0;
  for (int i = 0; i < q; ++i)
    scale *= norms[static_cast<std::size_t>(i)] * norm(l[static_cast<std::size_t>(std::min(i, static_cast<int>(l.size()) - 1))]);
  const double det = s.rows() == s.cols() ? std::abs(s.determinant()) : 0.0;
  rec.checks.push_back({"nonsingular-S", det > 1e-10 * scale, det, 1e-10 * scale});

  const Mat v = inner_products(vals, vals);
  const double min_eig = min_eigenvalue(v);
  const double thr = 1e-10 * v.trace() / q;
  rec.checks.push_back({"positive-V", min_eig > thr, min_eig, thr});
  return rec;
}

GodambeReport godambe_information(const InferenceFn& psi, const DensityModel& model,
                                  const Vec& theta, const Vec& z, const DensityPtr& p,
                                  const std::vector<L2Vec>* l_I, const Tolerances& tol) {
  GodambeReport rep;
  rep.name = psi.name;
  rep.regularity = check_regularity(psi, model, theta, z, p, tol);
  const auto vals = materialise_fn(psi, theta, z, p);
  rep.S = sensitivity(psi, theta, z, p);
  rep.V = symmetrize(inner_products(vals, vals));
  try {
    rep.J = godambe_form(rep.S, rep.V);
  } catch (const NumericalError& e) {
    throw NumericalError(psi.name + ": " + e.what() +
                         "; V is singular, regularise the estimating function (ridge > 0)");
  }
  if (l_I) {
    rep.has_extended = true;
    rep.S_ext = -inner_products(vals, *l_I);
    rep.J_ext = godambe_form(rep.S_ext, rep.V);
    rep.s_ext_deviation =
        (rep.S_ext - rep.S).cwiseAbs().maxCoeff() / std::max(1.0, rep.S.cwiseAbs().maxCoeff());
  }
  return rep;
}

EquivalencePoint equivalence_at(const std::vector<L2Vec>& psi, const std::vector<L2Vec>& phi,
                                double tol_equiv) {
  EquivalencePoint pt;
  const Mat g = inner_products(phi, phi);
  const Mat c = inner_products(psi, phi);
  pt.K = g.completeOrthogonalDecomposition().solve(c.transpose()).transpose();
  double res2 = 0.0, tot2 = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    L2Vec r = psi[i];
    for (std::size_t j = 0; j < phi.size(); ++j)
      r -= pt.K(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * phi[j];
    res2 += inner_product(r, r);
    tot2 += inner_product(psi[i], psi[i]);
  }
  pt.residual = tot2 > 0.0 ? std::sqrt(std::max(res2, 0.0) / tot2) : 0.0;
  if (pt.K.rows() == pt.K.cols() && pt.K.size() > 0) {
    Eigen::JacobiSVD<Mat> svd(pt.K);
    const Vec& sv = svd.singularValues();
    pt.full_rank = sv[0] > 0.0 && sv[sv.size() - 1] > 1e-10 * sv[0];
  }
  pt.equivalent = pt.full_rank && pt.residual < tol_equiv;
  return pt;
}

EquivalenceResult equivalence_check(const InferenceFn& psi, const InferenceFn& phi,
                                    const DensityModel& model, const std::vector<Vec>& theta_grid,
                                    const std::vector<Vec>& z_grid, const Tolerances& tol) {
  if (psi.q != phi.q) throw ConfigError("equivalence needs estimating functions of equal dimension");
  EquivalenceResult res;
  res.equivalent = true;
  for (const auto& th : theta_grid)
    for (const auto& z : z_grid) {
      const auto p = materialise(model, th, z, model.default_scheme(th, z), tol.mass);
      auto pt = equivalence_at(materialise_fn(psi, th, z, p), materialise_fn(phi, th, z, p), tol.equiv);
      pt.theta = th;
      pt.z = z;
      try {
        const Mat j1 = godambe_form(sensitivity(psi, th, z, p),
                                    inner_products(materialise_fn(psi, th, z, p), materialise_fn(psi, th, z, p)));
        const Mat j2 = godambe_form(sensitivity(phi, th, z, p),
                                    inner_products(materialise_fn(phi, th, z, p), materialise_fn(phi, th, z, p)));
        pt.J_gap = (j1 - j2).cwiseAbs().maxCoeff();
      } catch (const NumericalError&) {
        pt.J_gap = std::numeric_limits<double>::quiet_NaN();
      }
      res.equivalent = res.equivalent && pt.equivalent;
      res.points.push_back(std::move(pt));
    }
  return res;
}

Decomposition decompose(const std::vector<L2Vec>& psi, const Subspace& e_span) {
  Decomposition d;
  for (const auto& f : psi) {
    L2Vec fi = project(f, e_span);
    d.psi_A.push_back(f - fi);
    d.psi_I.push_back(std::move(fi));
  }
  return d;
}

BatteryReport optimality_battery(const std::vector<InferenceFn>& candidates,
                                 const DensityModel& model, const Vec& theta, const Vec& z,
                                 const DensityPtr& p, const std::vector<L2Vec>& l_I,
                                 const Tolerances& tol) {
  BatteryReport rep;
  rep.theta = theta;
  rep.z = z;
  const Subspace e_span(l_I);
  const Mat j_ll = symmetrize(inner_products(l_I, l_I));
  rep.J_l_I = godambe_form(-j_ll, j_ll);
  for (const auto& psi : candidates) {
    BatteryEntry e;
    e.name = psi.name;
    e.report = godambe_information(psi, model, theta, z, p, &l_I, tol);
    std::vector<L2Vec> centered;
    for (const auto& v : materialise_fn(psi, theta, z, p)) centered.push_back(center(v));
    const auto dec = decompose(centered, e_span);
    const Mat v_i = symmetrize(inner_products(dec.psi_I, dec.psi_I));
    try {
      e.J_psi_I = godambe_form(e.report.S_ext, v_i);
    } catch (const NumericalError&) {
      e.J_psi_I = Mat::Zero(psi.q, psi.q);
    }
    e.min_eig_gap = min_eigenvalue(e.J_psi_I - e.report.J_ext);
    e.equivalence_to_l_I = equivalence_at(dec.psi_I, l_I, tol.equiv);
    e.equivalence_to_l_I.theta = theta;
    e.equivalence_to_l_I.z = z;
    rep.entries.push_back(std::move(e));
  }
  const std::size_t n = rep.entries.size();
  rep.order.assign(n, std::vector<LownerOrder>(n, LownerOrder::equal));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      rep.order[i][j] = lowner_compare(rep.entries[i].report.J_ext, rep.entries[j].report.J_ext,
                                       tol.lowner, tol.equiv);
  for (std::size_t i = 0; i < n; ++i) {
    int above = 0;
    for (std::size_t j = 0; j < n; ++j)
      if (rep.order[j][i] == LownerOrder::greater) ++above;
    rep.entries[i].dominated_by = above;
    rep.entries[i].rank = 1 + above;
  }
  return rep;
}

std::vector<InferenceFn> location_battery() {
  auto make = [](std::string name, std::function<double(double)> f) {
    InferenceFn psi;
    psi.name = std::move(name);
    psi.q = 1;
    psi.eval = [f](Point x, const Vec& theta, const Vec&) { return Vec::Constant(1, f(x[0] - theta[0])); };
    return psi;
  };
  constexpr double k = 1.345;
  return {
      make("x-theta", [](double u) { return u; }),
      make("3(x-theta)", [](double u) { return 3.0 * u; }),
      make("(x-theta)^3", [](double u) { return u * u * u; }),
      make("tanh", [](double u) { return std::tanh(u); }),
      make("pseudo-huber", [k](double u) { return u / std::sqrt(1.0 + (u / k) * (u / k)); }),
      make("sin", [](double u) { return std::sin(u); }),
      make("cauchy-score", [](double u) { return u / (1.0 + u * u); }),
      make("atan", [](double u) { return std::atan(u); }),
  };
}

}  // namespace semieff
