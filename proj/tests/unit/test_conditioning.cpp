#include <doctest.h>

#include <cmath>

#include "semieff/conditioning.hpp"

using namespace semieff;

namespace {

Vec v1(double x) { return Vec::Constant(1, x); }

}  // namespace

TEST_CASE("poisson pair factorisation") {
  const auto fm = poisson_pair_factorization();
  CHECK(fm.completeness_declared);
  for (double th : {0.5, 1.0, 3.0})
    for (double z : {0.5, 2.0}) {
      const auto c = verify_factorization(fm, th, v1(z));
      CHECK(c.max_decomposition_error < 1e-10);
      CHECK(c.max_fiber_mass_error < 1e-10);
    }
}

TEST_CASE("conditional score is the binomial score and fiber-centred") {
  const auto fm = poisson_pair_factorization();
  const auto psi = conditional_score(fm);
  const double th = 1.5;
  // Given t = x1 + x2, x2 ~ Bin(t, th / (1 + th)); score x2/th - t/(1 + th).
  for (double x1 : {0.0, 2.0, 5.0})
    for (double x2 : {0.0, 1.0, 4.0}) {
      const double x[2] = {x1, x2};
      const double expect = x2 / th - (x1 + x2) / (1.0 + th);
      CHECK(psi.eval(Point(x, 2), v1(th), v1(2.0))[0] == doctest::Approx(expect).epsilon(1e-9));
    }
  CHECK(max_fiber_mean(psi, fm, th, v1(2.0)) < 1e-9);
}

TEST_CASE("conditional score is optimal in the battery") {
  const auto fm = poisson_pair_factorization();
  const auto rep = conditioning_optimality_demo(fm, {1.0}, {v1(0.5), v1(2.0)},
                                                conditioning_battery(fm));
  REQUIRE(rep.points.size() == 2);
  for (const auto& pt : rep.points) {
    CHECK(pt.J_conditional == doctest::Approx(pt.J_closed_form).epsilon(1e-6));
    CHECK(pt.J_closed_form == doctest::Approx(pt.z[0] / 2.0).epsilon(1e-12));
    CHECK(pt.conditional_regular);
    CHECK(pt.conditional_weakly_first);
    CHECK(pt.ties_equivalent);
    for (const auto& m : pt.members) {
      CAPTURE(m.name);
      if (m.regular) CHECK(m.J_ext <= pt.J_conditional * (1.0 + 1e-6));
    }
  }
  CHECK(rep.passed);
}

TEST_CASE("score minus conditional score depends on t only") {
  const auto fm = poisson_pair_factorization();
  const auto d = decomposition_residual(fm, 1.0, v1(2.0), conditioning_battery(fm));
  CHECK(d.R_formula_error < 1e-6);
  CHECK(d.R_fiber_spread < 1e-9);
  CHECK(d.score_sensitivity_ratio == doctest::Approx(-1.0).epsilon(1e-6));
  // Fiber-centred members are orthogonal to any function of t.
  for (const auto& [name, ip] : d.orthogonality)
    if (name == "conditional-score" || name == "x2-theta*x1" || name == "2*conditional-score") {
      CAPTURE(name);
      CHECK(std::abs(ip) < 1e-8);
    }
}
