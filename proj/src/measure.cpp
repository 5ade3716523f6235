#include "semieff/measure.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>

#include "semieff/errors.hpp"

namespace semieff {

namespace {

std::uint64_t next_scheme_id() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1);
}

Vec sqrt_probs(const Density& p) { return p.probabilities().cwiseSqrt(); }

}  // namespace

PointSet::PointSet(int dim, std::vector<double> coords) : dim_(dim), coords_(std::move(coords)) {
  if (dim_ < 1) throw ConfigError("point dimension must be >= 1");
  if (coords_.size() % static_cast<std::size_t>(dim_) != 0)
    throw ConfigError("coordinate count is not a multiple of the point dimension");
}

void PointSet::push_back(Point p) {
  if (static_cast<int>(p.size()) != dim_) throw ConfigError("point dimension mismatch");
  coords_.insert(coords_.end(), p.begin(), p.end());
}

const char* to_string(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::gauss_legendre: return "gauss-legendre-on-interval";
    case SchemeKind::lattice: return "discrete-lattice";
    case SchemeKind::monte_carlo: return "monte-carlo";
  }
  return "unknown";
}

void IntegrationScheme::finalise() {
  if (nodes_.size() < 2) throw ConfigError("an integration scheme needs at least 2 nodes");
  if (static_cast<std::size_t>(weights_.size()) != nodes_.size())
    throw ConfigError("node and weight counts differ");
  if ((weights_.array() < 0.0).any()) throw ConfigError("integration weights must be >= 0");
  id_ = next_scheme_id();
}

SchemePtr IntegrationScheme::gauss_legendre(Interval truncation, int panels, int order) {
  if (!(truncation.hi > truncation.lo)) throw ConfigError("truncation interval is empty");
  if (panels < 1) throw ConfigError("Gauss-Legendre panels must be >= 1");
  const auto [ref_nodes, ref_weights] = gauss_legendre_rule(order);
  std::shared_ptr<IntegrationScheme> s(new IntegrationScheme());
  s->kind_ = SchemeKind::gauss_legendre;
  s->truncation_ = truncation;
  std::vector<double> coords;
  std::vector<double> weights;
  const double h = truncation.width() / panels;
  for (int k = 0; k < panels; ++k) {
    const double a = truncation.lo + k * h;
    for (std::size_t i = 0; i < ref_nodes.size(); ++i) {
      coords.push_back(a + 0.5 * h * (ref_nodes[i] + 1.0));
      weights.push_back(0.5 * h * ref_weights[i]);
    }
  }
  s->nodes_ = PointSet(1, std::move(coords));
  s->weights_ = Eigen::Map<Vec>(weights.data(), static_cast<Eigen::Index>(weights.size()));
  s->measure_weights_ = s->weights_;
  s->finalise();
  return s;
}

SchemePtr IntegrationScheme::lattice(PointSet nodes) {
  std::shared_ptr<IntegrationScheme> s(new IntegrationScheme());
  s->kind_ = SchemeKind::lattice;
  s->weights_ = Vec::Ones(static_cast<Eigen::Index>(nodes.size()));
  s->measure_weights_ = s->weights_;
  s->nodes_ = std::move(nodes);
  s->finalise();
  return s;
}

SchemePtr IntegrationScheme::monte_carlo(PointSet nodes, Vec proposal_density,
                                         std::uint64_t seed) {
  if (static_cast<std::size_t>(proposal_density.size()) != nodes.size())
    throw ConfigError("proposal density length differs from node count");
  if ((proposal_density.array() <= 0.0).any())
    throw DomainError("Monte-Carlo proposal density must be positive at every node");
  std::shared_ptr<IntegrationScheme> s(new IntegrationScheme());
  s->kind_ = SchemeKind::monte_carlo;
  s->seed_ = seed;
  const auto n = static_cast<double>(nodes.size());
  s->weights_ = Vec::Constant(proposal_density.size(), 1.0 / n);
  s->measure_weights_ = s->weights_.cwiseQuotient(proposal_density);
  s->nodes_ = std::move(nodes);
  s->finalise();
  return s;
}

double raw_mass(const IntegrationScheme& scheme, const Vec& density_values) {
  return scheme.measure_weights().dot(density_values);
}

DensityPtr Density::materialise(SchemePtr scheme, Vec values, double tol_mass) {
  if (!scheme) throw ConfigError("density materialised without a scheme");
  if (static_cast<std::size_t>(values.size()) != scheme->size())
    throw ConfigError("density length differs from scheme node count");
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0) || !std::isfinite(values[i])) {
      std::ostringstream msg;
      msg << "density is nonpositive or non-finite at node " << i << " (x = ";
      const Point x = scheme->nodes()[static_cast<std::size_t>(i)];
      for (std::size_t d = 0; d < x.size(); ++d) msg << (d ? ", " : "") << x[d];
      msg << ", value = " << values[i] << ")";
      throw DomainError(msg.str());
    }
  }
  const double mass = semieff::raw_mass(*scheme, values);
  if (scheme->kind() != SchemeKind::monte_carlo && std::abs(mass - 1.0) > tol_mass) {
    std::ostringstream msg;
    msg << "density integrates to " << mass << " on the scheme (|mass - 1| > " << tol_mass
        << "); widen the truncation or refine the scheme";
    throw ConfigError(msg.str());
  }
  std::shared_ptr<Density> d(new Density());
  d->scheme_ = std::move(scheme);
  d->raw_mass_ = mass;
  d->values_ = values / mass;
  d->probs_ = d->scheme_->measure_weights().cwiseProduct(d->values_);
  return d;
}

bool Density::same_as(const Density& other) const {
  if (this == &other) return true;
  return scheme_->id() == other.scheme_->id() && values_ == other.values_;
}

L2Vec::L2Vec(DensityPtr base, Vec values) : base_(std::move(base)), values_(std::move(values)) {
  if (!base_) throw ConfigError("L2 vector without a base density");
  if (static_cast<std::size_t>(values_.size()) != base_->size())
    throw ConfigError("L2 vector length differs from scheme node count");
}

L2Vec L2Vec::zero(const DensityPtr& base) { return L2Vec(base, Vec::Zero(base->values().size())); }

L2Vec L2Vec::constant(const DensityPtr& base, double c) {
  return L2Vec(base, Vec::Constant(base->values().size(), c));
}

L2Vec L2Vec::from_function(const DensityPtr& base, const std::function<double(Point)>& f) {
  const auto& nodes = base->scheme()->nodes();
  Vec v(static_cast<Eigen::Index>(nodes.size()));
  for (std::size_t i = 0; i < nodes.size(); ++i) v[static_cast<Eigen::Index>(i)] = f(nodes[i]);
  return L2Vec(base, std::move(v));
}

void require_same_base(const L2Vec& f, const L2Vec& g) {
  if (!f.base() || !g.base() || !f.base()->same_as(*g.base()))
    throw ConfigError("L2 vectors live on different schemes or base densities");
}

L2Vec& L2Vec::operator+=(const L2Vec& other) {
  require_same_base(*this, other);
  values_ += other.values_;
  return *this;
}

L2Vec& L2Vec::operator-=(const L2Vec& other) {
  require_same_base(*this, other);
  values_ -= other.values_;
  return *this;
}

L2Vec& L2Vec::operator*=(double c) {
  values_ *= c;
  return *this;
}

L2Vec operator+(L2Vec a, const L2Vec& b) { return a += b; }
L2Vec operator-(L2Vec a, const L2Vec& b) { return a -= b; }
L2Vec operator*(double c, L2Vec a) { return a *= c; }

double inner_product(const L2Vec& f, const L2Vec& g) {
  require_same_base(f, g);
  return f.base()->probabilities().dot(f.values().cwiseProduct(g.values()));
}

double norm(const L2Vec& f) { return std::sqrt(std::max(0.0, inner_product(f, f))); }

double expectation(const L2Vec& f) { return f.base()->probabilities().dot(f.values()); }

L2Vec center(const L2Vec& f) {
  return L2Vec(f.base(), f.values().array() - expectation(f));
}

Mat inner_products(const std::vector<L2Vec>& a, const std::vector<L2Vec>& b) {
  Mat m(static_cast<Eigen::Index>(a.size()), static_cast<Eigen::Index>(b.size()));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = inner_product(a[i], b[j]);
  return m;
}

double suggested_ridge(const Mat& gram) {
  return gram.rows() == 0 ? 0.0 : 1e-10 * gram.trace() / static_cast<double>(gram.rows());
}

Subspace::Subspace(std::vector<L2Vec> basis, double ridge)
    : basis_(std::move(basis)), ridge_(ridge) {
  if (basis_.empty()) throw ConfigError("a subspace needs at least one basis vector");
  if (ridge_ < 0.0) throw ConfigError("ridge must be nonnegative");
  for (const auto& b : basis_) require_same_base(basis_.front(), b);
  const auto n = static_cast<Eigen::Index>(basis_.front().size());
  const auto k = static_cast<Eigen::Index>(basis_.size());
  matrix_.resize(n, k);
  for (Eigen::Index j = 0; j < k; ++j) matrix_.col(j) = basis_[static_cast<std::size_t>(j)].values();
  const Vec sp = sqrt_probs(*base());
  const Mat weighted = sp.asDiagonal() * matrix_;
  gram_ = weighted.transpose() * weighted;
  gram_ = 0.5 * (gram_ + gram_.transpose());

  if (ridge_ == 0.0) {
    Eigen::SelfAdjointEigenSolver<Mat> es(gram_, Eigen::EigenvaluesOnly);
    const double lmax = es.eigenvalues().maxCoeff();
    const double lmin = es.eigenvalues().minCoeff();
    if (!(lmax > 0.0) || lmin <= 1e-13 * lmax) {
      std::ostringstream msg;
      msg << "singular Gram matrix (eigenvalues in [" << lmin << ", " << lmax
          << "]); use ridge > 0, e.g. " << suggested_ridge(gram_);
      throw NumericalError(msg.str());
    }
    qr_.compute(weighted);
  } else {
    ridge_llt_.compute(gram_ + ridge_ * Mat::Identity(k, k));
    if (ridge_llt_.info() != Eigen::Success)
      throw NumericalError("Gram matrix plus ridge is not positive definite");
  }
}

Vec Subspace::coefficients(const L2Vec& f) const {
  require_same_base(basis_.front(), f);
  const Vec& probs = base()->probabilities();
  if (ridge_ == 0.0) {
    const Vec rhs = probs.cwiseSqrt().cwiseProduct(f.values());
    return qr_.solve(rhs);
  }
  const Vec rhs = matrix_.transpose() * probs.cwiseProduct(f.values());
  return ridge_llt_.solve(rhs);
}

Mat Subspace::weighted_orthonormal() const {
  const Vec sp = sqrt_probs(*base());
  const Mat weighted = sp.asDiagonal() * matrix_;
  if (ridge_ == 0.0) {
    return qr_.householderQ() * Mat::Identity(weighted.rows(), weighted.cols());
  }
  Eigen::HouseholderQR<Mat> qr(weighted);
  return qr.householderQ() * Mat::Identity(weighted.rows(), weighted.cols());
}

L2Vec project(const L2Vec& f, const Subspace& s) {
  const Vec c = s.coefficients(f);
  return L2Vec(s.base(), s.basis_matrix() * c);
}

L2Vec complement_project(const L2Vec& f, const Subspace& s) {
  return f - project(f, s);
}

Vec principal_angles(const Subspace& s1, const Subspace& s2) {
  if (!s1.base()->same_as(*s2.base()))
    throw ConfigError("principal angles need subspaces on the same base density");
  const Mat q1 = s1.weighted_orthonormal();
  const Mat q2 = s2.weighted_orthonormal();
  Eigen::JacobiSVD<Mat> svd(q1.transpose() * q2);
  Vec cosines = svd.singularValues().cwiseMin(1.0).cwiseMax(0.0);
  std::sort(cosines.data(), cosines.data() + cosines.size(), std::greater<>());
  return cosines;
}

std::vector<L2Vec> orthonormalize(const std::vector<L2Vec>& vectors, double rel_tol,
                                  bool center_first) {
  if (vectors.empty()) return {};
  const DensityPtr& base = vectors.front().base();
  const Vec sp = sqrt_probs(*base);
  const auto n = static_cast<Eigen::Index>(base->size());
  std::vector<Vec> kept;
  for (const auto& v : vectors) {
    require_same_base(vectors.front(), v);
    Vec x = center_first ? center(v).values() : v.values();
    const double nrm = sp.cwiseProduct(x).norm();
    if (nrm > 0.0 && std::isfinite(nrm)) kept.push_back(x / nrm);
  }
  if (kept.empty()) return {};
  Mat b(n, static_cast<Eigen::Index>(kept.size()));
  for (std::size_t j = 0; j < kept.size(); ++j) b.col(static_cast<Eigen::Index>(j)) = kept[j];
  const Mat weighted = sp.asDiagonal() * b;
  Eigen::BDCSVD<Mat> svd(weighted, Eigen::ComputeThinV);
  const Vec& sv = svd.singularValues();
  const double smax = sv.size() ? sv[0] : 0.0;
  std::vector<L2Vec> out;
  for (Eigen::Index j = 0; j < sv.size(); ++j) {
    if (!(sv[j] > rel_tol * smax)) break;
    out.emplace_back(base, b * svd.matrixV().col(j) / sv[j]);
  }
  return out;
}

}  // namespace semieff
