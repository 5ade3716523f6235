#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "semieff/measure.hpp"
#include "semieff/tolerances.hpp"

namespace semieff {

using ScalarFn = std::function<double(Point)>;

enum class NuisanceKind { scalar, vector, function_basis };

const char* to_string(NuisanceKind kind);

struct Support {
  enum class Kind { interval, lattice };
  Kind kind = Kind::interval;
  Interval range{-std::numeric_limits<double>::infinity(),
                 std::numeric_limits<double>::infinity()};
};

/// Semiparametric family p(x; theta, z) with theta in R^q and nuisance z.
///
/// Scalar nuisances are passed as length-1 vectors. Models are immutable and
/// safe to share between threads.
class DensityModel {
 public:
  virtual ~DensityModel() = default;

  virtual std::string name() const = 0;
  virtual int theta_dim() const = 0;
  virtual int nuisance_dim() const = 0;
  virtual NuisanceKind nuisance_kind() const = 0;
  virtual int sample_dim() const { return 1; }
  virtual Support support() const = 0;

  /// Throws DomainError for parameters outside (Theta, Z).
  virtual void check_parameters(const Vec& theta, const Vec& z) const;

  virtual double log_density(Point x, const Vec& theta, const Vec& z) const = 0;
  double density(Point x, const Vec& theta, const Vec& z) const;

  /// n i.i.d. draws; deterministic given the seed.
  virtual PointSet sample(const Vec& theta, const Vec& z, std::uint64_t seed,
                          std::size_t n) const = 0;

  /// grad_theta log p when available in closed form.
  virtual std::optional<Vec> analytic_score(Point x, const Vec& theta, const Vec& z) const;

  /// Uncentered functions spanning an approximation of T_N^0(theta, z).
  virtual std::vector<ScalarFn> nuisance_dictionary(const Vec& theta, const Vec& z) const = 0;

  /// Scheme wide enough for every nuisance value in `zs` at this theta.
  virtual SchemePtr default_scheme(const Vec& theta, std::span<const Vec> zs) const = 0;
  SchemePtr default_scheme(const Vec& theta, const Vec& z) const;

  /// Default nuisance grid for F_IA computations: 5 log-spaced values around z_ref.
  virtual std::vector<Vec> default_z_grid(const Vec& z_ref) const;

  virtual Vec default_theta() const = 0;
  virtual Vec default_z() const = 0;

  /// grad_theta log p: analytic if available, central differences otherwise.
  Vec interest_score(Point x, const Vec& theta, const Vec& z) const;
  /// Central finite-difference score, step max(1,|theta_i|) eps^(1/3).
  Vec finite_difference_score(Point x, const Vec& theta, const Vec& z) const;
};

using ModelPtr = std::shared_ptr<const DensityModel>;

/// Central-difference step used throughout for theta derivatives.
double fd_step(double theta_i);

DensityPtr materialise(const DensityModel& model, const Vec& theta, const Vec& z,
                       const SchemePtr& scheme, double tol_mass = Tolerances{}.mass);

/// Partial score, materialised and centered. Throws DomainError at a node with
/// nonpositive density.
std::vector<L2Vec> score(const DensityModel& model, const Vec& theta, const Vec& z,
                         const DensityPtr& p);
std::vector<L2Vec> score(const DensityModel& model, const Vec& theta, const Vec& z,
                         const SchemePtr& scheme, double tol_mass = Tolerances{}.mass);
std::vector<L2Vec> finite_difference_score(const DensityModel& model, const Vec& theta,
                                           const Vec& z, const DensityPtr& p);

/// Centered nuisance dictionary on p.
std::vector<L2Vec> nuisance_vectors(const DensityModel& model, const Vec& theta, const Vec& z,
                                    const DensityPtr& p);
Subspace nuisance_span(const DensityModel& model, const Vec& theta, const Vec& z,
                       const DensityPtr& p, double ridge = 0.0);

/// Central interval of probability `mass` for a univariate density, located
/// numerically on a wide Gauss-Legendre grid around `center` with `scale`.
Interval central_interval(const std::function<double(double)>& log_pdf, double center,
                          double scale, double mass);

/// Inverse-CDF sampler over a tabulated univariate density.
std::vector<double> tabulated_inverse_cdf_sample(const std::function<double(double)>& log_pdf,
                                                 Interval range, std::uint64_t seed,
                                                 std::size_t n, int cells = 20000);

// Built-in models.

/// N(theta, z): nuisance variance z > 0, dictionary {(x-theta)^2/z - 1}.
ModelPtr normal_mean_model();

/// Symmetric location: p = f_z(x - theta), f_z(u) = phi(u) (c0 + P_z(u)^2) / (c0 + |z|^2) with
/// P_z = sum_k z_k h_{2k} over orthonormal even Hermite polynomials. The nuisance
/// dictionary is the first `dictionary_size` even Hermite polynomials h_2..h_{2m}.
ModelPtr symmetric_location_model(int coefficients = 3, int dictionary_size = 6);

/// x = (x1, x2), x1 ~ Poisson(z), x2 ~ Poisson(z theta), lattice support.
ModelPtr poisson_pair_model();

/// normal-mean, symmetric-location and poisson-pair, in that order.
std::vector<ModelPtr> builtin_models();

/// Look up a built-in model by name; throws ConfigError for unknown names.
ModelPtr find_builtin_model(const std::string& name);

/// Orthonormal (probabilists') Hermite polynomial h_k(u) = He_k(u)/sqrt(k!).
double hermite_orthonormal(int k, double u);
/// Derivative of hermite_orthonormal in u.
double hermite_orthonormal_derivative(int k, double u);

}  // namespace semieff
