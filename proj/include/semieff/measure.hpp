#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "semieff/tolerances.hpp"

namespace semieff {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// A sample-space point. Univariate models use x[0]; lattice pairs use x[0], x[1].
using Point = std::span<const double>;

/// Flat row-major storage of points of a fixed dimension.
class PointSet {
 public:
  PointSet() = default;
  PointSet(int dim, std::vector<double> coords);

  int dim() const { return dim_; }
  std::size_t size() const { return dim_ == 0 ? 0 : coords_.size() / dim_; }
  bool empty() const { return size() == 0; }
  Point operator[](std::size_t i) const {
    return Point(coords_.data() + i * dim_, static_cast<std::size_t>(dim_));
  }
  const std::vector<double>& coords() const { return coords_; }
  void push_back(Point p);

 private:
  int dim_ = 1;
  std::vector<double> coords_;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
};

enum class SchemeKind { gauss_legendre, lattice, monte_carlo };

const char* to_string(SchemeKind kind);

/// Rule realising integrals  int f p dlambda  as weighted sums over nodes.
///
/// Quadrature and lattice schemes integrate against Lebesgue / counting measure
/// with `weights`. Monte-Carlo schemes draw nodes from a proposal density q0 and
/// keep weights 1/N; their measure weight at a node is 1 / (N q0(x)).
class IntegrationScheme {
 public:
  static std::shared_ptr<const IntegrationScheme> gauss_legendre(Interval truncation,
                                                                 int panels, int order);
  static std::shared_ptr<const IntegrationScheme> lattice(PointSet nodes);
  static std::shared_ptr<const IntegrationScheme> monte_carlo(PointSet nodes,
                                                              Vec proposal_density,
                                                              std::uint64_t seed);

  SchemeKind kind() const { return kind_; }
  const PointSet& nodes() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }
  int dim() const { return nodes_.dim(); }
  const Vec& weights() const { return weights_; }
  /// Weights against the dominating measure (includes 1/q0 for Monte-Carlo).
  const Vec& measure_weights() const { return measure_weights_; }
  std::uint64_t seed() const { return seed_; }
  const Interval& truncation() const { return truncation_; }
  std::uint64_t id() const { return id_; }

 private:
  IntegrationScheme() = default;
  void finalise();

  SchemeKind kind_ = SchemeKind::gauss_legendre;
  PointSet nodes_;
  Vec weights_;
  Vec measure_weights_;
  std::uint64_t seed_ = 0;
  Interval truncation_;
  std::uint64_t id_ = 0;
};

using SchemePtr = std::shared_ptr<const IntegrationScheme>;

/// Gauss-Legendre nodes and weights on [-1, 1].
std::pair<std::vector<double>, std::vector<double>> gauss_legendre_rule(int order);

/// Probability density materialised on a scheme, normalised to unit discrete mass.
class Density {
 public:
  /// Fails with DomainError on a nonpositive value and ConfigError if the raw
  /// mass is further than tol_mass from one.
  static std::shared_ptr<const Density> materialise(SchemePtr scheme, Vec values,
                                                    double tol_mass = Tolerances{}.mass);

  const SchemePtr& scheme() const { return scheme_; }
  const Vec& values() const { return values_; }
  /// Per-node probability masses; they sum to one.
  const Vec& probabilities() const { return probs_; }
  double raw_mass() const { return raw_mass_; }
  std::size_t size() const { return static_cast<std::size_t>(values_.size()); }

  bool same_as(const Density& other) const;

 private:
  Density() = default;
  SchemePtr scheme_;
  Vec values_;
  Vec probs_;
  double raw_mass_ = 1.0;
};

using DensityPtr = std::shared_ptr<const Density>;

/// Integral of the raw node values against the scheme's measure.
double raw_mass(const IntegrationScheme& scheme, const Vec& density_values);

/// Element of L2(p): function values at the scheme nodes, tagged with p.
class L2Vec {
 public:
  L2Vec() = default;
  L2Vec(DensityPtr base, Vec values);

  static L2Vec zero(const DensityPtr& base);
  static L2Vec constant(const DensityPtr& base, double c);
  static L2Vec from_function(const DensityPtr& base, const std::function<double(Point)>& f);

  const Vec& values() const { return values_; }
  const DensityPtr& base() const { return base_; }
  std::size_t size() const { return static_cast<std::size_t>(values_.size()); }

  L2Vec& operator+=(const L2Vec& other);
  L2Vec& operator-=(const L2Vec& other);
  L2Vec& operator*=(double c);

 private:
  DensityPtr base_;
  Vec values_;
};

L2Vec operator+(L2Vec a, const L2Vec& b);
L2Vec operator-(L2Vec a, const L2Vec& b);
L2Vec operator*(double c, L2Vec a);

/// Throws ConfigError unless both vectors live on the same density.
void require_same_base(const L2Vec& f, const L2Vec& g);

double inner_product(const L2Vec& f, const L2Vec& g);
double norm(const L2Vec& f);
double expectation(const L2Vec& f);
L2Vec center(const L2Vec& f);

/// Matrix of pairwise inner products <a_i, b_j>.
Mat inner_products(const std::vector<L2Vec>& a, const std::vector<L2Vec>& b);

/// Finite span of L2 vectors sharing one base density.
class Subspace {
 public:
  explicit Subspace(std::vector<L2Vec> basis, double ridge = 0.0);

  int dim() const { return static_cast<int>(basis_.size()); }
  const std::vector<L2Vec>& basis() const { return basis_; }
  const L2Vec& basis(int i) const { return basis_[static_cast<std::size_t>(i)]; }
  const DensityPtr& base() const { return basis_.front().base(); }
  const Mat& gram() const { return gram_; }
  double ridge() const { return ridge_; }
  /// Values of the basis as an N x k matrix.
  const Mat& basis_matrix() const { return matrix_; }

  /// Coefficients c with project(f) = sum_i c_i basis_i.
  Vec coefficients(const L2Vec& f) const;
  /// sqrt(p)-weighted orthonormal basis values (N x k), for angle computations.
  Mat weighted_orthonormal() const;

 private:
  std::vector<L2Vec> basis_;
  Mat matrix_;
  Mat gram_;
  double ridge_ = 0.0;
  Eigen::HouseholderQR<Mat> qr_;
  Eigen::LLT<Mat> ridge_llt_;
};

/// Suggested ridge 1e-10 trace(G)/dim for ill-conditioned dictionaries.
double suggested_ridge(const Mat& gram);

L2Vec project(const L2Vec& f, const Subspace& s);
L2Vec complement_project(const L2Vec& f, const Subspace& s);

/// Cosines of the principal angles between two spans, sorted descending.
Vec principal_angles(const Subspace& s1, const Subspace& s2);

/// Rank-revealing orthonormalisation in L2(p); drops directions whose singular
/// value falls below rel_tol times the largest one. Inputs are centered first
/// when `center_first` is set.
std::vector<L2Vec> orthonormalize(const std::vector<L2Vec>& vectors, double rel_tol = 1e-10,
                                  bool center_first = true);

}  // namespace semieff
