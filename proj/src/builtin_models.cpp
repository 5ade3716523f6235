#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "semieff/errors.hpp"
#include "semieff/model.hpp"

namespace semieff {

namespace {

constexpr double kSchemeMass = 1.0 - 1e-10;
constexpr double kLatticeTail = 1e-12;
constexpr int kPanels = 40;
constexpr int kOrder = 10;

double log_normal_pdf(double x, double mean, double var) {
  const double d = x - mean;
  return -0.5 * std::log(2.0 * std::numbers::pi * var) - 0.5 * d * d / var;
}

class NormalMeanModel final : public DensityModel {
 public:
  std::string name() const override { return "normal-mean"; }
  int theta_dim() const override { return 1; }
  int nuisance_dim() const override { return 1; }
  NuisanceKind nuisance_kind() const override { return NuisanceKind::scalar; }
  Support support() const override { return {}; }
  Vec default_theta() const override { return Vec::Constant(1, 0.0); }
  Vec default_z() const override { return Vec::Constant(1, 1.0); }

  void check_parameters(const Vec& theta, const Vec& z) const override {
    DensityModel::check_parameters(theta, z);
    if (!(z[0] > 0.0)) throw DomainError("normal-mean: variance z must be > 0");
  }

  double log_density(Point x, const Vec& theta, const Vec& z) const override {
    return log_normal_pdf(x[0], theta[0], z[0]);
  }

  PointSet sample(const Vec& theta, const Vec& z, std::uint64_t seed,
                  std::size_t n) const override {
    check_parameters(theta, z);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(theta[0], std::sqrt(z[0]));
    std::vector<double> xs(n);
    for (auto& x : xs) x = dist(rng);
    return PointSet(1, std::move(xs));
  }

  std::optional<Vec> analytic_score(Point x, const Vec& theta, const Vec& z) const override {
    return Vec::Constant(1, (x[0] - theta[0]) / z[0]);
  }

  std::vector<ScalarFn> nuisance_dictionary(const Vec& theta, const Vec& z) const override {
    const double m = theta[0], v = z[0];
    return {[m, v](Point x) { return (x[0] - m) * (x[0] - m) / v - 1.0; }};
  }

  SchemePtr default_scheme(const Vec& theta, std::span<const Vec> zs) const override {
    double half = 0.0;
    for (const auto& z : zs) {
      check_parameters(theta, z);
      const double v = z[0];
      const Interval iv = central_interval(
          [v](double u) { return log_normal_pdf(u, 0.0, v); }, 0.0, std::sqrt(v), kSchemeMass);
      half = std::max(half, iv.hi);
    }
    return IntegrationScheme::gauss_legendre({theta[0] - half, theta[0] + half}, kPanels, kOrder);
  }
};

class SymmetricLocationModel final : public DensityModel {
 public:
  SymmetricLocationModel(int coefficients, int dictionary_size)
      : k_(coefficients), m_(dictionary_size) {
    if (k_ < 1 || m_ < 1) throw ConfigError("symmetric-location: sizes must be >= 1");
  }

  std::string name() const override { return "symmetric-location"; }
  int theta_dim() const override { return 1; }
  int nuisance_dim() const override { return k_; }
  NuisanceKind nuisance_kind() const override { return NuisanceKind::function_basis; }
  Support support() const override { return {}; }
  Vec default_theta() const override { return Vec::Constant(1, 0.0); }
  Vec default_z() const override {
    Vec z = Vec::Zero(k_);
    z[0] = 1.0;
    if (k_ > 1) z[1] = 0.3;
    if (k_ > 2) z[2] = 0.1;
    return z;
  }

  void check_parameters(const Vec& theta, const Vec& z) const override {
    DensityModel::check_parameters(theta, z);
    if (!(z.squaredNorm() > 0.0)) throw DomainError("symmetric-location: z must be nonzero");
  }

  double log_shape(double u, const Vec& z) const {
    double p = 0.0;
    for (int k = 0; k < k_; ++k) p += z[k] * hermite_orthonormal(2 * k, u);
    return log_normal_pdf(u, 0.0, 1.0) + std::log(kC0 + p * p) - std::log(kC0 + z.squaredNorm());
  }

  double log_density(Point x, const Vec& theta, const Vec& z) const override {
    return log_shape(x[0] - theta[0], z);
  }

  std::optional<Vec> analytic_score(Point x, const Vec& theta, const Vec& z) const override {
    const double u = x[0] - theta[0];
    double p = 0.0, dp = 0.0;
    for (int k = 0; k < k_; ++k) {
      p += z[k] * hermite_orthonormal(2 * k, u);
      dp += z[k] * hermite_orthonormal_derivative(2 * k, u);
    }
    // d/dtheta log f(x - theta) = -(log f)'(u)
    return Vec::Constant(1, u - 2.0 * p * dp / (kC0 + p * p));
  }

  PointSet sample(const Vec& theta, const Vec& z, std::uint64_t seed,
                  std::size_t n) const override {
    check_parameters(theta, z);
    auto lp = [this, z](double u) { return log_shape(u, z); };
    const Interval range = central_interval(lp, 0.0, 1.0, 1.0 - 1e-14);
    auto us = tabulated_inverse_cdf_sample(lp, range, seed, n);
    for (auto& u : us) u += theta[0];
    return PointSet(1, std::move(us));
  }

  std::vector<ScalarFn> nuisance_dictionary(const Vec& theta, const Vec&) const override {
    std::vector<ScalarFn> dict;
    const double m = theta[0];
    for (int j = 1; j <= m_; ++j)
      dict.push_back([m, j](Point x) { return hermite_orthonormal(2 * j, x[0] - m); });
    return dict;
  }

  SchemePtr default_scheme(const Vec& theta, std::span<const Vec> zs) const override {
    double half = 0.0;
    for (const auto& z : zs) {
      check_parameters(theta, z);
      const Interval iv =
          central_interval([this, z](double u) { return log_shape(u, z); }, 0.0, 1.0, kSchemeMass);
      half = std::max(half, iv.hi);
    }
    return IntegrationScheme::gauss_legendre({theta[0] - half, theta[0] + half}, kPanels, kOrder);
  }

  std::vector<Vec> default_z_grid(const Vec& z_ref) const override {
    std::vector<Vec> grid;
    for (double e : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
      Vec z = z_ref;
      z.tail(k_ - 1) *= std::exp2(e);
      grid.push_back(z);
    }
    return grid;
  }

 private:
  static constexpr double kC0 = 0.1;
  int k_;
  int m_;
};

class PoissonPairModel final : public DensityModel {
 public:
  std::string name() const override { return "poisson-pair"; }
  int theta_dim() const override { return 1; }
  int nuisance_dim() const override { return 1; }
  NuisanceKind nuisance_kind() const override { return NuisanceKind::scalar; }
  int sample_dim() const override { return 2; }
  Support support() const override {
    return {Support::Kind::lattice, {0.0, std::numeric_limits<double>::infinity()}};
  }
  Vec default_theta() const override { return Vec::Constant(1, 1.0); }
  Vec default_z() const override { return Vec::Constant(1, 2.0); }

  void check_parameters(const Vec& theta, const Vec& z) const override {
    DensityModel::check_parameters(theta, z);
    if (!(theta[0] > 0.0)) throw DomainError("poisson-pair: theta must be > 0");
    if (!(z[0] > 0.0)) throw DomainError("poisson-pair: z must be > 0");
  }

  static double log_poisson(double k, double rate) {
    if (k < 0.0 || k != std::floor(k)) return -std::numeric_limits<double>::infinity();
    return k * std::log(rate) - rate - std::lgamma(k + 1.0);
  }

  double log_density(Point x, const Vec& theta, const Vec& z) const override {
    return log_poisson(x[0], z[0]) + log_poisson(x[1], z[0] * theta[0]);
  }

  std::optional<Vec> analytic_score(Point x, const Vec& theta, const Vec& z) const override {
    return Vec::Constant(1, x[1] / theta[0] - z[0]);
  }

  PointSet sample(const Vec& theta, const Vec& z, std::uint64_t seed,
                  std::size_t n) const override {
    check_parameters(theta, z);
    std::mt19937_64 rng(seed);
    std::poisson_distribution<long> d1(z[0]);
    std::poisson_distribution<long> d2(z[0] * theta[0]);
    std::vector<double> xs;
    xs.reserve(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
      xs.push_back(static_cast<double>(d1(rng)));
      xs.push_back(static_cast<double>(d2(rng)));
    }
    return PointSet(2, std::move(xs));
  }

  std::vector<ScalarFn> nuisance_dictionary(const Vec& theta, const Vec& z) const override {
    const double th = theta[0], zz = z[0];
    return {[th, zz](Point x) { return (x[0] + x[1]) / zz - (1.0 + th); }};
  }

  SchemePtr default_scheme(const Vec& theta, std::span<const Vec> zs) const override {
    int t_max = 0;
    for (const auto& z : zs) {
      check_parameters(theta, z);
      const double rate = z[0] * (1.0 + theta[0]);
      double cdf = 0.0;
      int t = 0;
      for (;; ++t) {
        cdf += std::exp(log_poisson(t, rate));
        if (1.0 - cdf < kLatticeTail && t > rate) break;
      }
      t_max = std::max(t_max, t);
    }
    std::vector<double> coords;
    for (int t = 0; t <= t_max; ++t)
      for (int x2 = 0; x2 <= t; ++x2) {
        coords.push_back(t - x2);
        coords.push_back(x2);
      }
    return IntegrationScheme::lattice(PointSet(2, std::move(coords)));
  }
};

}  // namespace

ModelPtr normal_mean_model() { return std::make_shared<NormalMeanModel>(); }

ModelPtr symmetric_location_model(int coefficients, int dictionary_size) {
  return std::make_shared<SymmetricLocationModel>(coefficients, dictionary_size);
}

ModelPtr poisson_pair_model() { return std::make_shared<PoissonPairModel>(); }

std::vector<ModelPtr> builtin_models() {
  return {normal_mean_model(), symmetric_location_model(), poisson_pair_model()};
}

ModelPtr find_builtin_model(const std::string& name) {
  for (auto& m : builtin_models())
    if (m->name() == name) return m;
  throw ConfigError("unknown model '" + name +
                    "' (expected normal-mean, symmetric-location or poisson-pair)");
}

}  // namespace semieff
