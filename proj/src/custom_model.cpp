#include "semieff/custom_model.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include <json.hpp>

#include "semieff/errors.hpp"

namespace semieff {

namespace {

constexpr int kPanels = 40;
constexpr int kOrder = 10;

class CustomModel final : public DensityModel {
 public:
  explicit CustomModel(CustomModelSpec spec)
      : spec_(std::move(spec)), expr_(Expression::parse(spec_.density)) {
    if (spec_.name.empty()) throw ConfigError("custom model: name is empty");
    if (spec_.theta_dim < 1) throw ConfigError("custom model: theta_dim must be >= 1");
    if (spec_.z_dim < 1) throw ConfigError("custom model: z_dim must be >= 1");
    if (expr_.max_theta_index() > spec_.theta_dim)
      throw ConfigError("custom model: density uses theta" +
                        std::to_string(expr_.max_theta_index()) + " but theta_dim is " +
                        std::to_string(spec_.theta_dim));
    if (expr_.max_z_index() > spec_.z_dim)
      throw ConfigError("custom model: density uses z" + std::to_string(expr_.max_z_index()) +
                        " but z_dim is " + std::to_string(spec_.z_dim));
    const auto& r = spec_.support.range;
    if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || !(r.hi > r.lo))
      throw ConfigError("custom model: support must be a finite interval with lo < hi");
    if (spec_.support.kind == Support::Kind::lattice &&
        (r.lo != std::floor(r.lo) || r.hi != std::floor(r.hi)))
      throw ConfigError("custom model: lattice bounds must be integers");
    if (spec_.default_theta.size() == 0) spec_.default_theta = Vec::Zero(spec_.theta_dim);
    if (spec_.default_z.size() == 0) spec_.default_z = Vec::Ones(spec_.z_dim);
    if (spec_.default_theta.size() != spec_.theta_dim || spec_.default_z.size() != spec_.z_dim)
      throw ConfigError("custom model: default parameter lengths do not match dimensions");
  }

  std::string name() const override { return spec_.name; }
  int theta_dim() const override { return spec_.theta_dim; }
  int nuisance_dim() const override { return spec_.z_dim; }
  NuisanceKind nuisance_kind() const override {
    return spec_.z_dim == 1 ? NuisanceKind::scalar : NuisanceKind::vector;
  }
  Support support() const override { return spec_.support; }
  Vec default_theta() const override { return spec_.default_theta; }
  Vec default_z() const override { return spec_.default_z; }

  double log_density(Point x, const Vec& theta, const Vec& z) const override {
    const auto& r = spec_.support.range;
    if (x[0] < r.lo || x[0] > r.hi) return -std::numeric_limits<double>::infinity();
    return std::log(expr_.eval(x[0], theta, z));
  }

  PointSet sample(const Vec& theta, const Vec& z, std::uint64_t seed,
                  std::size_t n) const override {
    check_parameters(theta, z);
    const auto& r = spec_.support.range;
    if (spec_.support.kind == Support::Kind::interval) {
      auto lp = [&](double u) { return log_density(Point(&u, 1), theta, z); };
      return PointSet(1, tabulated_inverse_cdf_sample(lp, r, seed, n));
    }
    std::vector<double> values, cdf;
    double acc = 0.0;
    for (double k = r.lo; k <= r.hi; k += 1.0) {
      const double p = std::exp(log_density(Point(&k, 1), theta, z));
      if (!(p >= 0.0) || !std::isfinite(p))
        throw DomainError(spec_.name + ": density is negative or non-finite at x = " +
                          std::to_string(k));
      acc += p;
      values.push_back(k);
      cdf.push_back(acc);
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, acc);
    std::vector<double> out(n);
    for (auto& x : out) {
      const auto it = std::upper_bound(cdf.begin(), cdf.end(), unif(rng));
      x = values[static_cast<std::size_t>(
          std::min<std::ptrdiff_t>(it - cdf.begin(), static_cast<std::ptrdiff_t>(cdf.size()) - 1))];
    }
    return PointSet(1, std::move(out));
  }

  std::vector<ScalarFn> nuisance_dictionary(const Vec& theta, const Vec& z) const override {
    std::vector<ScalarFn> dict;
    for (int k = 0; k < spec_.z_dim; ++k) {
      dict.push_back([this, theta, z, k](Point x) {
        const double h = fd_step(z[k]);
        Vec zp = z, zm = z;
        zp[k] += h;
        zm[k] -= h;
        return (log_density(x, theta, zp) - log_density(x, theta, zm)) / (2.0 * h);
      });
    }
    return dict;
  }

  SchemePtr default_scheme(const Vec& theta, std::span<const Vec> zs) const override {
    for (const auto& z : zs) check_parameters(theta, z);
    const auto& r = spec_.support.range;
    if (spec_.support.kind == Support::Kind::interval)
      return IntegrationScheme::gauss_legendre(r, kPanels, kOrder);
    std::vector<double> coords;
    for (double k = r.lo; k <= r.hi; k += 1.0) coords.push_back(k);
    return IntegrationScheme::lattice(PointSet(1, std::move(coords)));
  }

 private:
  CustomModelSpec spec_;
  Expression expr_;
};

Vec read_vector(const nlohmann::json& j, const char* key) {
  if (!j.is_array()) throw ConfigError(std::string("custom model: '") + key + "' must be an array");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number())
      throw ConfigError(std::string("custom model: '") + key + "' must contain numbers");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

void reject_unknown(const nlohmann::json& j, const std::set<std::string>& allowed,
                    const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key()))
      throw ConfigError(where + ": unknown key '" + it.key() + "'");
}

}  // namespace

ModelPtr custom_model(const CustomModelSpec& spec) { return std::make_shared<CustomModel>(spec); }

CustomModelSpec parse_custom_model_spec(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("custom model: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("custom model: expected a JSON object");
  reject_unknown(j,
                 {"name", "density", "theta_dim", "z_dim", "support", "default_theta",
                  "default_z"},
                 "custom model");
  CustomModelSpec spec;
  try {
    spec.name = j.at("name").get<std::string>();
    spec.density = j.at("density").get<std::string>();
    spec.theta_dim = j.value("theta_dim", 1);
    spec.z_dim = j.value("z_dim", 1);
    const auto& s = j.at("support");
    if (!s.is_object()) throw ConfigError("custom model: 'support' must be an object");
    reject_unknown(s, {"kind", "lo", "hi"}, "custom model support");
    const std::string kind = s.at("kind").get<std::string>();
    if (kind == "interval")
      spec.support.kind = Support::Kind::interval;
    else if (kind == "lattice")
      spec.support.kind = Support::Kind::lattice;
    else
      throw ConfigError("custom model: support kind must be 'interval' or 'lattice'");
    spec.support.range = {s.at("lo").get<double>(), s.at("hi").get<double>()};
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("custom model: ") + e.what());
  }
  if (j.contains("default_theta")) spec.default_theta = read_vector(j["default_theta"], "default_theta");
  if (j.contains("default_z")) spec.default_z = read_vector(j["default_z"], "default_z");
  return spec;
}

}  // namespace semieff
