#include "semieff/efficiency.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "semieff/errors.hpp"
#include "semieff/linalg.hpp"

namespace semieff {

const char* to_string(TransportKind kind) { return kind == TransportKind::m ? "m" : "e"; }

namespace {

void require_same_scheme(const DensityPtr& a, const DensityPtr& b) {
  if (a->scheme()->id() != b->scheme()->id())
    throw ConfigError("parallel transport between densities on different schemes");
}

DensityPtr check_origin(const L2Vec& a, const DensityModel& model, const Vec& theta, const Vec& z,
                        double tol_mass) {
  const auto p = materialise(model, theta, z, a.base()->scheme(), tol_mass);
  const Vec& mine = a.base()->values();
  const double gap = ((mine - p->values()).cwiseAbs().array() / p->values().array()).maxCoeff();
  if (gap > 1e-10)
    throw ConfigError("transported vector does not live on p(.; theta, z) for the given z");
  return a.base();
}

bool same_z(const Vec& a, const Vec& b) {
  return a.size() == b.size() && (a - b).cwiseAbs().maxCoeff() <= 1e-14 * std::max(1.0, a.cwiseAbs().maxCoeff());
}

}  // namespace

L2Vec m_transport(const L2Vec& a, const DensityPtr& destination) {
  require_same_scheme(a.base(), destination);
  const Vec ratio = a.base()->values().cwiseQuotient(destination->values());
  return L2Vec(destination, ratio.cwiseProduct(a.values()));
}

L2Vec e_transport(const L2Vec& a, const DensityPtr& destination) {
  require_same_scheme(a.base(), destination);
  const double m = destination->probabilities().dot(a.values());
  return L2Vec(destination, (a.values().array() - m).matrix());
}

TransportedVec m_transport(const L2Vec& a, const DensityModel& model, const Vec& theta,
                           const Vec& z, const Vec& z_star, double tol_mass) {
  check_origin(a, model, theta, z, tol_mass);
  const auto dest = materialise(model, theta, z_star, a.base()->scheme(), tol_mass);
  return {m_transport(a, dest), z, z_star, TransportKind::m};
}

TransportedVec e_transport(const L2Vec& a, const DensityModel& model, const Vec& theta,
                           const Vec& z, const Vec& z_star, double tol_mass) {
  check_origin(a, model, theta, z, tol_mass);
  const auto dest = materialise(model, theta, z_star, a.base()->scheme(), tol_mass);
  return {e_transport(a, dest), z, z_star, TransportKind::e};
}

EfficientScore efficient_score(const DensityModel& model, const Vec& theta, const Vec& z,
                               const DensityPtr& p, double ridge) {
  EfficientScore es;
  es.l = score(model, theta, z, p);
  const Subspace tn = nuisance_span(model, theta, z, p, ridge);
  for (const auto& li : es.l) es.l_E.push_back(complement_project(li, tn));
  es.J_E = symmetrize(inner_products(es.l_E, es.l_E));
  const double ref = std::max(max_eigenvalue(inner_products(es.l, es.l)), 1e-300);
  es.singular = min_eigenvalue(es.J_E) <= 1e-10 * ref;
  return es;
}

AmbientDictionary default_ambient_dictionary(const DensityModel& model, const Vec& theta,
                                             const std::vector<Vec>& z_grid,
                                             const SchemePtr& scheme) {
  if (z_grid.empty()) throw ConfigError("ambient dictionary needs a nonempty z grid");
  AmbientDictionary dict;
  const Vec& z_mid = z_grid[z_grid.size() / 2];
  const auto p_mid = materialise(model, theta, z_mid, scheme);
  const auto& nodes = scheme->nodes();
  const Vec& pi = p_mid->probabilities();
  const int dim = model.sample_dim();
  std::vector<double> c(static_cast<std::size_t>(dim)), s(static_cast<std::size_t>(dim));
  for (int d = 0; d < dim; ++d) {
    double m1 = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const double x = nodes[i][static_cast<std::size_t>(d)];
      m1 += pi[static_cast<Eigen::Index>(i)] * x;
      m2 += pi[static_cast<Eigen::Index>(i)] * x * x;
    }
    c[static_cast<std::size_t>(d)] = m1;
    s[static_cast<std::size_t>(d)] = std::sqrt(std::max(m2 - m1 * m1, 1e-300));
  }
  if (dim == 1) {
    const double c0 = c[0], s0 = s[0];
    for (int k = 1; k <= 8; ++k) {
      dict.functions.push_back([k, c0, s0](Point x) { return hermite_orthonormal(k, (x[0] - c0) / s0); });
      dict.labels.push_back("hermite_" + std::to_string(k));
    }
  } else if (dim == 2) {
    for (int deg = 1; deg <= 4; ++deg)
      for (int a = deg; a >= 0; --a) {
        const int b = deg - a;
        dict.functions.push_back([a, b, c, s](Point x) {
          return std::pow((x[0] - c[0]) / s[0], a) * std::pow((x[1] - c[1]) / s[1], b);
        });
        dict.labels.push_back("monomial_" + std::to_string(a) + "_" + std::to_string(b));
      }
  } else {
    throw ConfigError("ambient dictionary supports one- or two-dimensional sample spaces");
  }
  for (std::size_t g = 0; g < z_grid.size(); ++g) {
    const Vec z = z_grid[g];
    for (int j = 0; j < model.theta_dim(); ++j) {
      dict.functions.push_back([&model, theta, z, j](Point x) { return model.interest_score(x, theta, z)[j]; });
      dict.labels.push_back("score_" + std::to_string(j + 1) + "@z" + std::to_string(g));
    }
    const auto nd = model.nuisance_dictionary(theta, z);
    for (std::size_t k = 0; k < nd.size(); ++k) {
      dict.functions.push_back(nd[k]);
      dict.labels.push_back("nuisance_" + std::to_string(k + 1) + "@z" + std::to_string(g));
    }
  }
  return dict;
}

std::vector<L2Vec> materialise_ambient(const AmbientDictionary& dict, const DensityPtr& p) {
  std::vector<L2Vec> vs;
  for (const auto& f : dict.functions) vs.push_back(L2Vec::from_function(p, f));
  return orthonormalize(vs, 1e-10, true);
}

FiaResult fia_space(const DensityModel& model, const Vec& theta, const Vec& z_ref,
                    std::vector<Vec> z_grid, const DensityPtr& p_ref,
                    const std::vector<L2Vec>& ambient, const Tolerances& tol) {
  if (ambient.empty()) throw ConfigError("F_IA needs a nonempty ambient space");
  if (std::none_of(z_grid.begin(), z_grid.end(), [&](const Vec& z) { return same_z(z, z_ref); }))
    z_grid.push_back(z_ref);
  FiaResult r;
  r.z_ref = z_ref;
  r.z_grid = z_grid;
  r.ambient = ambient;
  r.base = p_ref;
  for (const auto& a : ambient) require_same_base(ambient.front(), a);
  require_same_base(ambient.front(), L2Vec::zero(p_ref));
  const auto k = static_cast<Eigen::Index>(ambient.size());

  auto residual = [&](const L2Vec& f) {
    const double nf = norm(f);
    if (nf == 0.0) return 0.0;
    double inside = 0.0;
    for (const auto& a : ambient) inside += std::pow(inner_product(a, f), 2);
    return std::sqrt(std::max(0.0, 1.0 - inside / (nf * nf)));
  };
  const auto l = score(model, theta, z_ref, p_ref);
  std::vector<std::string> offending;
  for (std::size_t j = 0; j < l.size(); ++j) {
    const double res = residual(l[j]);
    if (res > tol.sub) {
      std::ostringstream msg;
      msg << "score component " << j + 1 << " (relative residual " << res << ")";
      offending.push_back(msg.str());
    }
  }
  if (!offending.empty()) {
    std::string msg = "ambient space too small for F_IA; outside the ambient:";
    for (const auto& o : offending) msg += " " + o + ";";
    throw ConfigError(msg);
  }

  for (const auto& zs : z_grid) {
    const auto ps = materialise(model, theta, zs, p_ref->scheme(), tol.mass);
    for (const auto& nu : nuisance_vectors(model, theta, zs, ps)) {
      L2Vec t = m_transport(nu, p_ref);
      const double n = norm(t);
      if (n > 0.0) r.constraints.push_back((1.0 / n) * t);
    }
  }
  const auto m = static_cast<Eigen::Index>(r.constraints.size());
  r.constraint_residuals.resize(m);
  Mat c = inner_products(ambient, r.constraints);
  for (Eigen::Index j = 0; j < m; ++j)
    r.constraint_residuals[j] = std::sqrt(std::max(0.0, 1.0 - c.col(j).squaredNorm()));

  Mat u = Mat::Identity(k, k);
  int rank = 0;
  if (m > 0) {
    Eigen::JacobiSVD<Mat> svd(c, Eigen::ComputeFullU);
    const Vec& sv = svd.singularValues();
    const double smax = sv.size() ? sv[0] : 0.0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
      if (sv[i] > 1e-9 * smax && smax > 0.0) ++rank;
    u = svd.matrixU();
  }
  r.constraint_rank = rank;
  for (Eigen::Index col = rank; col < k; ++col) {
    L2Vec f = L2Vec::zero(p_ref);
    for (Eigen::Index i = 0; i < k; ++i) f += u(i, col) * ambient[static_cast<std::size_t>(i)];
    r.basis.push_back(std::move(f));
  }
  return r;
}

InformationScore information_score(const std::vector<L2Vec>& l, const FiaResult& fia) {
  InformationScore is;
  for (const auto& li : l) {
    L2Vec acc = L2Vec::zero(li.base());
    for (const auto& b : fia.basis) acc += inner_product(li, b) * b;
    is.l_I.push_back(std::move(acc));
  }
  is.J_I = symmetrize(inner_products(is.l_I, is.l_I));
  return is;
}

std::vector<L2Vec> transport_fia(const FiaResult& fia, const DensityPtr& destination) {
  std::vector<L2Vec> out;
  for (const auto& b : fia.basis) out.push_back(e_transport(b, destination));
  return out;
}

Attainability attainability_check(const DensityModel& model, const Vec& theta,
                                  const FiaResult& fia, const Tolerances& tol) {
  Attainability att;
  att.attainable = true;
  att.worst_deviation = -1.0;
  for (const auto& z : fia.z_grid) {
    AngleRow row;
    row.z = z;
    const auto pz = materialise(model, theta, z, fia.base->scheme(), tol.mass);
    const auto es = efficient_score(model, theta, z, pz);
    if (es.singular) {
      // l_E vanishes: the bound is degenerate and trivially attained.
      row.deviation = 0.0;
    } else if (fia.basis.empty()) {
      row.cosines = Vec::Zero(static_cast<Eigen::Index>(es.l_E.size()));
      row.deviation = 1.0;
    } else {
      const Subspace le(es.l_E);
      const Subspace f(transport_fia(fia, pz));
      Vec cos = principal_angles(le, f);
      row.cosines = cos;
      double smallest = cos.size() ? cos.minCoeff() : 0.0;
      if (cos.size() < static_cast<Eigen::Index>(es.l_E.size())) smallest = 0.0;
      row.deviation = 1.0 - smallest;
    }
    if (row.deviation > att.worst_deviation) {
      att.worst_deviation = row.deviation;
      att.worst_z = z;
    }
    if (!(row.deviation < tol.sub)) att.attainable = false;
    att.rows.push_back(std::move(row));
  }
  return att;
}

EfficiencyReport efficiency_analysis(const DensityModel& model, const Vec& theta,
                                     const Vec& z_ref, std::vector<Vec> z_grid,
                                     const Tolerances& tol) {
  model.check_parameters(theta, z_ref);
  if (z_grid.empty()) z_grid = model.default_z_grid(z_ref);
  if (std::none_of(z_grid.begin(), z_grid.end(), [&](const Vec& z) { return same_z(z, z_ref); }))
    z_grid.push_back(z_ref);
  EfficiencyReport rep;
  rep.theta = theta;
  rep.z_ref = z_ref;
  rep.z_grid = z_grid;
  const auto scheme = model.default_scheme(theta, std::span<const Vec>(z_grid));
  const auto p = materialise(model, theta, z_ref, scheme, tol.mass);
  const auto es = efficient_score(model, theta, z_ref, p);
  rep.l = es.l;
  rep.l_E = es.l_E;
  rep.J_E = es.J_E;
  rep.J_E_singular = es.singular;
  const auto ambient =
      materialise_ambient(default_ambient_dictionary(model, theta, z_grid, scheme), p);
  rep.ambient_dim = static_cast<int>(ambient.size());
  rep.fia = fia_space(model, theta, z_ref, z_grid, p, ambient, tol);
  const auto is = information_score(rep.l, rep.fia);
  rep.l_I = is.l_I;
  rep.J_I = is.J_I;
  rep.attainability = attainability_check(model, theta, rep.fia, tol);
  rep.min_eig_JE_minus_JI = min_eigenvalue(rep.J_E - rep.J_I);

  try {
    const Mat inv = spd_inverse(rep.J_I, "J_I");
    const auto q = static_cast<Eigen::Index>(rep.l_I.size());
    std::vector<L2Vec> grad;
    for (Eigen::Index i = 0; i < q; ++i) {
      L2Vec g = L2Vec::zero(p);
      for (Eigen::Index j = 0; j < q; ++j) g += inv(i, j) * rep.l_I[static_cast<std::size_t>(j)];
      grad.push_back(std::move(g));
    }
    const auto nu = nuisance_vectors(model, theta, z_ref, p);
    rep.gradient_orthogonality = nu.empty() ? 0.0 : inner_products(grad, nu).cwiseAbs().maxCoeff();
    rep.gradient_identity = (inner_products(grad, rep.l) - Mat::Identity(q, q)).cwiseAbs().maxCoeff();
  } catch (const NumericalError&) {
    rep.gradient_orthogonality = std::numeric_limits<double>::quiet_NaN();
    rep.gradient_identity = std::numeric_limits<double>::quiet_NaN();
  }
  return rep;
}

}  // namespace semieff
