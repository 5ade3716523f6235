#include "semieff/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "semieff/errors.hpp"

namespace semieff {

const char* to_string(NuisanceKind kind) {
  switch (kind) {
    case NuisanceKind::scalar: return "scalar";
    case NuisanceKind::vector: return "vector";
    case NuisanceKind::function_basis: return "function-basis-coefficients";
  }
  return "unknown";
}

double fd_step(double theta_i) {
  static const double cbrt_eps = std::cbrt(std::numeric_limits<double>::epsilon());
  return std::max(1.0, std::abs(theta_i)) * cbrt_eps;
}

void DensityModel::check_parameters(const Vec& theta, const Vec& z) const {
  if (theta.size() != theta_dim()) {
    std::ostringstream msg;
    msg << name() << ": theta must have " << theta_dim() << " component(s), got " << theta.size();
    throw DomainError(msg.str());
  }
  if (z.size() != nuisance_dim()) {
    std::ostringstream msg;
    msg << name() << ": z must have " << nuisance_dim() << " component(s), got " << z.size();
    throw DomainError(msg.str());
  }
  if (!theta.allFinite() || !z.allFinite()) throw DomainError(name() + ": non-finite parameter");
}

double DensityModel::density(Point x, const Vec& theta, const Vec& z) const {
  return std::exp(log_density(x, theta, z));
}

std::optional<Vec> DensityModel::analytic_score(Point, const Vec&, const Vec&) const {
  return std::nullopt;
}

SchemePtr DensityModel::default_scheme(const Vec& theta, const Vec& z) const {
  const Vec zs[] = {z};
  return default_scheme(theta, std::span<const Vec>(zs));
}

std::vector<Vec> DensityModel::default_z_grid(const Vec& z_ref) const {
  std::vector<Vec> grid;
  for (double e : {-1.0, -0.5, 0.0, 0.5, 1.0}) grid.push_back(z_ref * std::exp2(e));
  return grid;
}

Vec DensityModel::finite_difference_score(Point x, const Vec& theta, const Vec& z) const {
  Vec s(theta.size());
  for (Eigen::Index j = 0; j < theta.size(); ++j) {
    const double h = fd_step(theta[j]);
    Vec tp = theta, tm = theta;
    tp[j] += h;
    tm[j] -= h;
    s[j] = (log_density(x, tp, z) - log_density(x, tm, z)) / (2.0 * h);
  }
  return s;
}

Vec DensityModel::interest_score(Point x, const Vec& theta, const Vec& z) const {
  if (auto s = analytic_score(x, theta, z)) return *s;
  return finite_difference_score(x, theta, z);
}

DensityPtr materialise(const DensityModel& model, const Vec& theta, const Vec& z,
                       const SchemePtr& scheme, double tol_mass) {
  model.check_parameters(theta, z);
  const auto& nodes = scheme->nodes();
  if (nodes.dim() != model.sample_dim())
    throw ConfigError(model.name() + ": scheme dimension does not match the sample space");
  Vec values(static_cast<Eigen::Index>(nodes.size()));
  for (std::size_t i = 0; i < nodes.size(); ++i)
    values[static_cast<Eigen::Index>(i)] = model.density(nodes[i], theta, z);
  return Density::materialise(scheme, std::move(values), tol_mass);
}

namespace {

std::vector<L2Vec> score_impl(const DensityModel& model, const Vec& theta, const Vec& z,
                              const DensityPtr& p, bool force_fd) {
  const auto& nodes = p->scheme()->nodes();
  const auto q = static_cast<std::size_t>(model.theta_dim());
  const auto n = static_cast<Eigen::Index>(nodes.size());
  std::vector<Vec> comps(q, Vec(n));
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const Vec s = force_fd ? model.finite_difference_score(nodes[i], theta, z)
                           : model.interest_score(nodes[i], theta, z);
    if (!s.allFinite()) {
      std::ostringstream msg;
      msg << model.name() << ": score is not finite at node " << i
          << " (nonpositive density?)";
      throw DomainError(msg.str());
    }
    for (std::size_t j = 0; j < q; ++j)
      comps[j][static_cast<Eigen::Index>(i)] = s[static_cast<Eigen::Index>(j)];
  }
  std::vector<L2Vec> out;
  for (auto& c : comps) out.push_back(center(L2Vec(p, std::move(c))));
  return out;
}

}  // namespace

std::vector<L2Vec> score(const DensityModel& model, const Vec& theta, const Vec& z,
                         const DensityPtr& p) {
  return score_impl(model, theta, z, p, false);
}

std::vector<L2Vec> score(const DensityModel& model, const Vec& theta, const Vec& z,
                         const SchemePtr& scheme, double tol_mass) {
  return score(model, theta, z, materialise(model, theta, z, scheme, tol_mass));
}

std::vector<L2Vec> finite_difference_score(const DensityModel& model, const Vec& theta,
                                           const Vec& z, const DensityPtr& p) {
  return score_impl(model, theta, z, p, true);
}

std::vector<L2Vec> nuisance_vectors(const DensityModel& model, const Vec& theta, const Vec& z,
                                    const DensityPtr& p) {
  std::vector<L2Vec> out;
  for (const auto& f : model.nuisance_dictionary(theta, z))
    out.push_back(center(L2Vec::from_function(p, f)));
  return out;
}

Subspace nuisance_span(const DensityModel& model, const Vec& theta, const Vec& z,
                       const DensityPtr& p, double ridge) {
  return Subspace(nuisance_vectors(model, theta, z, p), ridge);
}

Interval central_interval(const std::function<double(double)>& log_pdf, double center,
                          double scale, double mass) {
  // Symmetric search: the half-width grows in steps of scale/8 until both tails
  // fall below (1 - mass)/2. Tails are integrated on a wide composite rule.
  const double tail_target = 0.5 * (1.0 - mass);
  const auto [gn, gw] = gauss_legendre_rule(8);
  const double step = scale / 8.0;
  const int max_steps = 8 * 60;
  std::vector<double> left(max_steps), right(max_steps);
  for (int k = 0; k < max_steps; ++k) {
    double l = 0.0, r = 0.0;
    const double a = k * step;
    for (std::size_t i = 0; i < gn.size(); ++i) {
      const double d = a + 0.5 * step * (gn[i] + 1.0);
      l += 0.5 * step * gw[i] * std::exp(log_pdf(center - d));
      r += 0.5 * step * gw[i] * std::exp(log_pdf(center + d));
    }
    left[static_cast<std::size_t>(k)] = l;
    right[static_cast<std::size_t>(k)] = r;
  }
  // Tail beyond half-width k*step is the sum of cells k..end.
  double ltail = 0.0, rtail = 0.0;
  int k = max_steps;
  while (k > 0) {
    const double nl = ltail + left[static_cast<std::size_t>(k - 1)];
    const double nr = rtail + right[static_cast<std::size_t>(k - 1)];
    if (nl > tail_target || nr > tail_target) break;
    ltail = nl;
    rtail = nr;
    --k;
  }
  const double half = std::max(k, 1) * step;
  return {center - half, center + half};
}

std::vector<double> tabulated_inverse_cdf_sample(const std::function<double(double)>& log_pdf,
                                                 Interval range, std::uint64_t seed,
                                                 std::size_t n, int cells) {
  const double h = range.width() / cells;
  std::vector<double> cdf(static_cast<std::size_t>(cells) + 1, 0.0);
  double prev = std::exp(log_pdf(range.lo));
  for (int i = 1; i <= cells; ++i) {
    const double cur = std::exp(log_pdf(range.lo + i * h));
    cdf[static_cast<std::size_t>(i)] = cdf[static_cast<std::size_t>(i - 1)] + 0.5 * h * (prev + cur);
    prev = cur;
  }
  const double total = cdf.back();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> out(n);
  for (auto& x : out) {
    const double u = unif(rng) * total;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    const auto j = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(it - cdf.begin(), 1, cells));
    const double c0 = cdf[j - 1], c1 = cdf[j];
    const double frac = c1 > c0 ? (u - c0) / (c1 - c0) : 0.5;
    x = range.lo + (static_cast<double>(j - 1) + frac) * h;
  }
  return out;
}

double hermite_orthonormal(int k, double u) {
  if (k < 0) return 0.0;
  double hm1 = 0.0, h = 1.0;
  for (int j = 0; j < k; ++j) {
    const double next = (u * h - std::sqrt(static_cast<double>(j)) * hm1) / std::sqrt(j + 1.0);
    hm1 = h;
    h = next;
  }
  return h;
}

double hermite_orthonormal_derivative(int k, double u) {
  return k == 0 ? 0.0 : std::sqrt(static_cast<double>(k)) * hermite_orthonormal(k - 1, u);
}

}  // namespace semieff
