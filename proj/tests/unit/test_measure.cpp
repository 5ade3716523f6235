#include <doctest.h>

#include <cmath>
#include <random>

#include "semieff/errors.hpp"
#include "semieff/measure.hpp"

using namespace semieff;

namespace {

DensityPtr uniform_density(int panels = 4, int order = 8) {
  auto scheme = IntegrationScheme::gauss_legendre({0.0, 2.0}, panels, order);
  return Density::materialise(scheme, Vec::Constant(static_cast<Eigen::Index>(scheme->size()), 0.5));
}

L2Vec fn(const DensityPtr& p, double (*f)(double)) {
  return L2Vec::from_function(p, [f](Point x) { return f(x[0]); });
}

}  // namespace

TEST_CASE("gauss-legendre integrates polynomials up to degree 2n-1 exactly") {
  const auto [nodes, weights] = gauss_legendre_rule(10);
  for (int k = 0; k <= 19; ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) s += weights[i] * std::pow(nodes[i], k);
    const double exact = k % 2 ? 0.0 : 2.0 / (k + 1);
    CHECK(s == doctest::Approx(exact).epsilon(1e-13));
  }
}

TEST_CASE("composite scheme integrates exp on an interval") {
  auto scheme = IntegrationScheme::gauss_legendre({-1.0, 3.0}, 5, 10);
  double s = 0.0;
  for (std::size_t i = 0; i < scheme->size(); ++i)
    s += scheme->weights()[static_cast<Eigen::Index>(i)] * std::exp(scheme->nodes()[i][0]);
  CHECK(s == doctest::Approx(std::exp(3.0) - std::exp(-1.0)).epsilon(1e-13));
}

TEST_CASE("materialise renormalises and rejects bad densities") {
  auto scheme = IntegrationScheme::gauss_legendre({0.0, 2.0}, 4, 8);
  const auto n = static_cast<Eigen::Index>(scheme->size());
  const auto p = Density::materialise(scheme, Vec::Constant(n, 0.5 * (1.0 + 5e-7)));
  CHECK(p->probabilities().sum() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(p->raw_mass() == doctest::Approx(1.0 + 5e-7).epsilon(1e-12));
  CHECK_THROWS_AS(Density::materialise(scheme, Vec::Constant(n, 0.6)), ConfigError);
  Vec bad = Vec::Constant(n, 0.5);
  bad[3] = 0.0;
  CHECK_THROWS_AS(Density::materialise(scheme, bad), DomainError);
}

TEST_CASE("inner products, centering and base checks") {
  const auto p = uniform_density();
  const L2Vec x = fn(p, [](double v) { return v; });
  // Uniform on [0, 2]: E[x] = 1, E[x^2] = 4/3.
  CHECK(expectation(x) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(inner_product(x, x) == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
  CHECK(expectation(center(x)) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(norm(center(x)) == doctest::Approx(std::sqrt(1.0 / 3.0)).epsilon(1e-14));

  const auto q = uniform_density(5, 8);
  CHECK_THROWS_AS(inner_product(x, L2Vec::constant(q, 1.0)), ConfigError);
}

TEST_CASE("projection onto polynomial spans matches Legendre oracle") {
  const auto p = uniform_density();
  const L2Vec u = fn(p, [](double v) { return v - 1.0; });
  const L2Vec cube = fn(p, [](double v) { return std::pow(v - 1.0, 3); });
  const Subspace s({u});
  // On u uniform in [-1, 1], the best multiple of u for u^3 is E[u^4]/E[u^2] = 3/5.
  const L2Vec pc = project(cube, s);
  CHECK((pc.values() - 0.6 * u.values()).cwiseAbs().maxCoeff() < 1e-13);
  const L2Vec r = complement_project(cube, s);
  CHECK(std::abs(inner_product(r, u)) < 1e-14);
}

TEST_CASE("singular gram is rejected, ridge accepts it") {
  const auto p = uniform_density();
  const L2Vec u = fn(p, [](double v) { return v; });
  CHECK_THROWS_AS(Subspace({u, 2.0 * u}), NumericalError);
  const Subspace s({u, 2.0 * u}, suggested_ridge(inner_products({u, 2.0 * u}, {u, 2.0 * u})));
  CHECK(norm(project(u, s) - u) < 1e-6);
}

TEST_CASE("principal angles and orthonormalisation") {
  const auto p = uniform_density();
  const L2Vec a = center(fn(p, [](double v) { return v; }));
  const L2Vec b = center(fn(p, [](double v) { return v * v; }));
  const Vec same = principal_angles(Subspace({a, b}), Subspace({a + b, a - b}));
  CHECK(same.minCoeff() == doctest::Approx(1.0).epsilon(1e-12));
  const auto on = orthonormalize({a, b, a + b});
  REQUIRE(on.size() == 2);
  const Mat g = inner_products(on, on);
  CHECK((g - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("monte-carlo scheme weights by the proposal") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  std::vector<double> xs(5000);
  for (auto& x : xs) x = u(rng);
  const auto n = static_cast<Eigen::Index>(xs.size());
  auto scheme = IntegrationScheme::monte_carlo(PointSet(1, xs), Vec::Constant(n, 0.5), 7);
  CHECK(scheme->measure_weights()[0] == doctest::Approx(1.0 / (5000 * 0.5)));
  CHECK(scheme->seed() == 7u);
  const auto p = Density::materialise(scheme, Vec::Constant(n, 0.5));
  CHECK(p->probabilities().sum() == doctest::Approx(1.0));
}

TEST_CASE("lattice scheme uses counting measure") {
  PointSet pts(1, {0.0, 1.0, 2.0, 3.0});
  auto scheme = IntegrationScheme::lattice(pts);
  CHECK(scheme->weights().sum() == doctest::Approx(4.0));
  const auto p = Density::materialise(scheme, (Vec(4) << 0.1, 0.2, 0.3, 0.4).finished());
  const L2Vec x = L2Vec::from_function(p, [](Point v) { return v[0]; });
  CHECK(expectation(x) == doctest::Approx(2.0));
}
