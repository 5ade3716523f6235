#include <doctest.h>

#include <cmath>

#include "semieff/efficiency.hpp"
#include "semieff/linalg.hpp"
#include "toys.hpp"

using namespace semieff;

namespace {

Vec v1(double x) { return Vec::Constant(1, x); }

}  // namespace

TEST_CASE("m and e transport") {
  const auto m = normal_mean_model();
  const Vec th = v1(0.0);
  const auto p = materialise(*m, th, v1(1.0), m->default_scheme(th, std::vector<Vec>{v1(1.0), v1(3.0)}));
  const auto q = materialise(*m, th, v1(3.0), p->scheme());
  const L2Vec a = center(L2Vec::from_function(p, [](Point x) { return x[0] * x[0] * x[0]; }));

  const L2Vec am = m_transport(a, q);
  CHECK(std::abs(expectation(am)) < 1e-10);
  const L2Vec x_q = L2Vec::from_function(q, [](Point x) { return x[0]; });
  const L2Vec x_p = L2Vec::from_function(p, [](Point x) { return x[0]; });
  CHECK(inner_product(am, x_q) == doctest::Approx(inner_product(a, x_p)).epsilon(1e-9));

  const L2Vec ae = e_transport(a, q);
  CHECK(std::abs(expectation(ae)) < 1e-10);
  // e-transport only recentres: x^3 - 3 z x has zero mean under every N(0, z).
  CHECK(norm(ae - center(L2Vec::from_function(q, [](Point x) { return x[0] * x[0] * x[0]; }))) < 1e-10);

  const auto tv = e_transport(a, *m, th, v1(1.0), v1(3.0));
  CHECK(tv.kind == TransportKind::e);
  CHECK(tv.destination_z[0] == 3.0);
}

TEST_CASE("efficient information of the normal location model is 1/z") {
  const auto m = normal_mean_model();
  for (double z : {0.5, 1.0, 2.0, 4.0}) {
    const auto r = efficiency_analysis(*m, v1(0.3), v1(z));
    CHECK(r.J_E(0, 0) == doctest::Approx(1.0 / z).epsilon(1e-8));
    CHECK(r.J_I(0, 0) == doctest::Approx(1.0 / z).epsilon(1e-6));
    CHECK(r.attainability.attainable);
    CHECK(r.gradient_orthogonality <= 1e-6);
    CHECK(r.gradient_identity <= 1e-6);
    CHECK(r.min_eig_JE_minus_JI >= -1e-8);
  }
}

TEST_CASE("nuisance-free projection leaves the score alone") {
  const auto m = poisson_pair_model();
  const Vec th = v1(1.0), z = v1(2.0);
  const auto p = materialise(*m, th, z, m->default_scheme(th, z));
  const auto es = efficient_score(*m, th, z, p);
  // z/theta - 1 / ((1 + theta)/z)
  CHECK(es.J_E(0, 0) == doctest::Approx(z[0] / (th[0] * (1.0 + th[0]))).epsilon(1e-8));
  CHECK_FALSE(es.singular);
}

TEST_CASE("degenerate model has singular efficient information") {
  const auto m = testing::degenerate_model();
  const Vec th = v1(0.0), z = v1(1.0);
  const auto p = materialise(*m, th, z, m->default_scheme(th, z));
  const auto es = efficient_score(*m, th, z, p);
  CHECK(es.singular);
  CHECK(std::abs(es.J_E(0, 0)) < 1e-8);
}

TEST_CASE("efficient information under reparametrisation") {
  const auto base = efficiency_analysis(*normal_mean_model(), v1(0.4), v1(2.0));
  for (double c : {0.5, 2.0, 3.0}) {
    const auto m = testing::reparametrised_normal_model(c);
    const auto r = efficiency_analysis(*m, v1(0.4 * c), v1(2.0));
    CHECK(r.J_E(0, 0) == doctest::Approx(base.J_E(0, 0) / (c * c)).epsilon(1e-6));
  }
}

TEST_CASE("rotating mixture is not attainable") {
  const auto m = testing::rotating_mixture_model();
  const auto r = efficiency_analysis(*m, v1(0.0), m->default_z());
  CHECK_FALSE(r.attainability.attainable);
  CHECK(r.attainability.worst_deviation > 1e-6);
  CHECK(r.min_eig_JE_minus_JI >= -1e-8);
}

TEST_CASE("F_IA is orthonormal and satisfies its constraints") {
  const auto m = symmetric_location_model();
  const auto r = efficiency_analysis(*m, m->default_theta(), m->default_z());
  const Mat g = inner_products(r.fia.basis, r.fia.basis);
  CHECK((g - Mat::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff() < 1e-10);
  if (r.fia.dim() > 0 && !r.fia.constraints.empty())
    CHECK(inner_products(r.fia.basis, r.fia.constraints).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(r.fia.constraint_residuals.size() == static_cast<Eigen::Index>(r.fia.constraints.size()));
  CHECK(r.ambient_dim >= r.fia.dim());
}
