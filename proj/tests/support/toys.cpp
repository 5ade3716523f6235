#include "toys.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "semieff/errors.hpp"

namespace semieff::testing {

double log_normal(double x, double mean, double var) {
  const double d = x - mean;
  return -0.5 * std::log(2.0 * std::numbers::pi * var) - 0.5 * d * d / var;
}

namespace {

double phi(double u) { return std::exp(log_normal(u, 0.0, 1.0)); }

SchemePtr wide_scheme(double lo, double hi) {
  return IntegrationScheme::gauss_legendre({lo - 9.0, hi + 9.0}, 40, 10);
}

class RotatingMixture final : public DensityModel {
 public:
  explicit RotatingMixture(double w) : w_(w) {}
  std::string name() const override { return "rotating-mixture"; }
  int theta_dim() const override { return 1; }
  int nuisance_dim() const override { return 1; }
  NuisanceKind nuisance_kind() const override { return NuisanceKind::scalar; }
  Support support() const override { return {}; }
  Vec default_theta() const override { return Vec::Constant(1, 0.0); }
  Vec default_z() const override { return Vec::Constant(1, 1.5); }

  double log_density(Point x, const Vec& theta, const Vec& z) const override {
    const double u = x[0] - theta[0];
    return std::log((1.0 - w_) * phi(u) + w_ * phi(u - z[0]));
  }

  PointSet sample(const Vec& theta, const Vec& z, std::uint64_t seed,
                  std::size_t n) const override {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    std::bernoulli_distribution pick(w_);
    std::vector<double> xs(n);
    for (auto& x : xs) x = theta[0] + g(rng) + (pick(rng) ? z[0] : 0.0);
    return PointSet(1, std::move(xs));
  }

  std::optional<Vec> analytic_score(Point x, const Vec& theta, const Vec& z) const override {
    const double u = x[0] - theta[0];
    const double a = (1.0 - w_) * phi(u), b = w_ * phi(u - z[0]);
    return Vec::Constant(1, (a * u + b * (u - z[0])) / (a + b));
  }

  std::vector<ScalarFn> nuisance_dictionary(const Vec& theta, const Vec& z) const override {
    const double m = theta[0], s = z[0], w = w_;
    return {[m, s, w](Point x) {
      const double u = x[0] - m;
      const double a = (1.0 - w) * phi(u), b = w * phi(u - s);
      return b * (u - s) / (a + b);
    }};
  }

  SchemePtr default_scheme(const Vec& theta, std::span<const Vec> zs) const override {
    double lo = theta[0], hi = theta[0];
    for (const auto& z : zs) {
      lo = std::min(lo, theta[0] + z[0]);
      hi = std::max(hi, theta[0] + z[0]);
    }
    return wide_scheme(lo, hi);
  }

 private:
  double w_;
};

class DegenerateModel final : public DensityModel {
 public:
  std::string name() const override { return "degenerate"; }
  int theta_dim() const override { return 1; }
  int nuisance_dim() const override { return 1; }
  NuisanceKind nuisance_kind() const override { return NuisanceKind::scalar; }
  Support support() const override { return {}; }
  Vec default_theta() const override { return Vec::Constant(1, 0.0); }
  Vec default_z() const override { return Vec::Constant(1, 1.0); }

  double log_density(Point x, const Vec& theta, const Vec& z) const override {
    return log_normal(x[0], theta[0] + z[0], 1.0);
  }

  PointSet sample(const Vec& theta, const Vec& z, std::uint64_t seed,
                  std::size_t n) const override {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(theta[0] + z[0], 1.0);
    std::vector<double> xs(n);
    for (auto& x : xs) x = g(rng);
    return PointSet(1, std::move(xs));
  }

  std::optional<Vec> analytic_score(Point x, const Vec& theta, const Vec& z) const override {
    return Vec::Constant(1, x[0] - theta[0] - z[0]);
  }

  std::vector<ScalarFn> nuisance_dictionary(const Vec& theta, const Vec& z) const override {
    const double m = theta[0] + z[0];
    return {[m](Point x) { return x[0] - m; }};
  }

  SchemePtr default_scheme(const Vec& theta, std::span<const Vec> zs) const override {
    double lo = theta[0] + zs.front()[0], hi = lo;
    for (const auto& z : zs) {
      lo = std::min(lo, theta[0] + z[0]);
      hi = std::max(hi, theta[0] + z[0]);
    }
    return wide_scheme(lo, hi);
  }
};

class ReparametrisedNormal final : public DensityModel {
 public:
  explicit ReparametrisedNormal(double c) : c_(c) {
    if (c == 0.0) throw ConfigError("reparametrised-normal: c must be nonzero");
  }
  std::string name() const override { return "reparametrised-normal"; }
  int theta_dim() const override { return 1; }
  int nuisance_dim() const override { return 1; }
  NuisanceKind nuisance_kind() const override { return NuisanceKind::scalar; }
  Support support() const override { return {}; }
  Vec default_theta() const override { return Vec::Constant(1, 0.0); }
  Vec default_z() const override { return Vec::Constant(1, 1.0); }

  void check_parameters(const Vec& theta, const Vec& z) const override {
    DensityModel::check_parameters(theta, z);
    if (!(z[0] > 0.0)) throw DomainError("reparametrised-normal: z must be > 0");
  }

  double log_density(Point x, const Vec& theta, const Vec& z) const override {
    return log_normal(x[0], theta[0] / c_, z[0]);
  }

  PointSet sample(const Vec& theta, const Vec& z, std::uint64_t seed,
                  std::size_t n) const override {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(theta[0] / c_, std::sqrt(z[0]));
    std::vector<double> xs(n);
    for (auto& x : xs) x = g(rng);
    return PointSet(1, std::move(xs));
  }

  std::vector<ScalarFn> nuisance_dictionary(const Vec& theta, const Vec& z) const override {
    const double m = theta[0] / c_, v = z[0];
    return {[m, v](Point x) { return (x[0] - m) * (x[0] - m) / v - 1.0; }};
  }

  SchemePtr default_scheme(const Vec& theta, std::span<const Vec> zs) const override {
    double v = 0.0;
    for (const auto& z : zs) v = std::max(v, z[0]);
    const double m = theta[0] / c_, half = 7.0 * std::sqrt(v);
    return IntegrationScheme::gauss_legendre({m - half, m + half}, 40, 10);
  }

 private:
  double c_;
};

}  // namespace

ModelPtr rotating_mixture_model(double w) { return std::make_shared<RotatingMixture>(w); }
ModelPtr degenerate_model() { return std::make_shared<DegenerateModel>(); }
ModelPtr reparametrised_normal_model(double c) { return std::make_shared<ReparametrisedNormal>(c); }

}  // namespace semieff::testing
