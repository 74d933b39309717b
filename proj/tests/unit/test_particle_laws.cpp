#include <doctest.h>

#include <cmath>

#include "ldrate/particle_laws.hpp"
#include "oracles.hpp"

using namespace ldrate;

TEST_CASE("chi-square log-Laplace matches quadrature") {
  const auto law = make_law(BuiltInLaw::ChiSq1);
  for (double t : {-3.0, -0.5, 0.0, 0.1, 0.3, 0.45}) {
    const Vec th = Vec::Constant(1, t);
    CHECK(law->log_laplace(th).value() == doctest::Approx(oracle::chisq_log_mgf(t)).epsilon(1e-10));
  }
  CHECK(law->log_laplace(Vec::Constant(1, 0.5)).is_inf());
  CHECK_FALSE(law->in_domain(Vec::Constant(1, 0.5)));
  CHECK(law->in_domain(Vec::Constant(1, 0.4999)));
}

TEST_CASE("chi-square derivatives against differences") {
  const auto law = make_law(BuiltInLaw::ChiSq1);
  const double t = 0.2, h = 1e-5;
  auto L = [&](double s) { return law->log_laplace(Vec::Constant(1, s)).value(); };
  CHECK(law->grad_log_laplace(Vec::Constant(1, t))[0] == doctest::Approx((L(t + h) - L(t - h)) / (2 * h)).epsilon(1e-8));
  CHECK(law->hess_log_laplace(Vec::Constant(1, t))(0, 0) ==
        doctest::Approx((L(t + h) - 2 * L(t) + L(t - h)) / (h * h)).epsilon(1e-4));
}

TEST_CASE("chi-square pair domain and rate") {
  const auto law = make_law(BuiltInLaw::ChiSqPair);
  REQUIRE(law->dim() == 2);
  Vec t(2);
  t << 0.1, 0.3;
  // Z = X^2 (1, 1): Lambda(t) = -log(1 - 2(t1 + t2)) / 2
  CHECK(law->log_laplace(t).value() == doctest::Approx(-0.5 * std::log(1 - 0.8)));
  REQUIRE(law->polyhedral_domain() != nullptr);
  t << 0.3, 0.3;
  CHECK_FALSE(law->in_domain(t));
}

TEST_CASE("single-particle rate is the support function of the domain") {
  const auto law = make_law(BuiltInLaw::ChiSq1);
  CHECK(law->rate(Vec::Constant(1, 3.0)).value() == doctest::Approx(1.5));
  CHECK(law->rate(Vec::Constant(1, 0.0)).value() == doctest::Approx(0.0));
  CHECK(law->rate(Vec::Constant(1, -1.0)).is_inf());
}

TEST_CASE("gauss cross log-Laplace matches quadrature") {
  const auto law = make_law(BuiltInLaw::GaussCross);
  REQUIRE(law->dim() == 3);
  CHECK_FALSE(law->is_convex());
  CHECK(law->polyhedral_domain() == nullptr);
  for (auto [a, b, c] : {std::tuple{0.1, -0.2, 0.3}, std::tuple{-1.0, 0.2, -0.5}, std::tuple{0.0, 0.0, 0.0}}) {
    Vec t(3);
    t << a, b, c;
    CHECK(law->log_laplace(t).value() == doctest::Approx(oracle::cross_log_mgf(a, b, c)).epsilon(1e-8));
  }
  Vec out(3);
  out << 0.4, 0.4, 0.3;  // (1-0.8)^2 < 0.09
  CHECK_FALSE(law->in_domain(out));
}

TEST_CASE("gauss cross rate lives on the rank-one cone") {
  const auto law = make_law(BuiltInLaw::GaussCross);
  Vec z(3);
  z << 1.0, 4.0, -2.0;
  CHECK(law->rate(z).value() == doctest::Approx(2.5));
  z << 1.0, 4.0, 1.0;
  CHECK(law->rate(z).is_inf());
}

TEST_CASE("tilted draws have the tilted mean") {
  Rng rng(11);
  const auto law = make_law(BuiltInLaw::GaussCross);
  Vec t(3);
  t << 0.1, -0.3, 0.2;
  Vec mean = Vec::Zero(3);
  const int N = 200000;
  for (int i = 0; i < N; ++i) mean += law->draw_tilted(t, rng);
  mean /= N;
  const Vec g = law->grad_log_laplace(t);
  for (int k = 0; k < 3; ++k) CHECK(mean[k] == doctest::Approx(g[k]).epsilon(0.02));

  const auto chi = make_law(BuiltInLaw::ChiSq1);
  const Vec th = Vec::Constant(1, 0.3);
  double s = 0;
  for (int i = 0; i < 2000; ++i) s += chi->draw_tilted_sum(50, th, rng)[0];
  // mean of a sum of 50 tilted draws is 50 / (1 - 0.6)
  CHECK(s / 2000 == doctest::Approx(125.0).epsilon(0.01));
}

TEST_CASE("tilt outside the domain is rejected") {
  Rng rng(1);
  const auto chi = make_law(BuiltInLaw::ChiSq1);
  CHECK_THROWS(chi->draw_tilted_sum(3, Vec::Constant(1, 0.6), rng));
  CHECK_THROWS(make_law("NoSuchLaw"));
}
