#include <doctest.h>

#include <cmath>
#include <random>

#include "ldrate/errors.hpp"
#include "ldrate/nonconvex.hpp"

using namespace ldrate;

namespace {

// Brute force over the split box for T = 2 (both sign patterns), as an
// independent check of the multistart search.
double brute_rate_T2(double k1, double k2, const Vec& z, int n = 801) {
  const double U = z[2] - z[0], V = z[3] - z[1];
  double best = -1.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double tu = double(i) / (n - 1), tv = double(j) / (n - 1);
      const double u1 = tu * U / (k1 - 1), u2 = (1 - tu) * U / (k2 - 1);
      const double v1 = tv * V / (k1 - 1), v2 = (1 - tv) * V / (k2 - 1);
      const double x0 = z[0] - u1 - u2, y0 = z[1] - v1 - v2;
      if (x0 <= 0 || y0 <= 0) continue;
      for (int e1 : {-1, 1})
        for (int e2 : {-1, 1}) {
          const double r0 = z[4] - e1 * std::sqrt(u1 * v1) - e2 * std::sqrt(u2 * v2);
          best = std::max(best, x0 * y0 - r0 * r0);
        }
    }
  if (best <= 0) return INFINITY;
  return 0.5 * (z[0] + z[1]) - 1 - 0.5 * std::log(best);
}

}  // namespace

TEST_CASE("bulk conjugate") {
  Vec z(5);
  z << 1, 1, 1, 1, 0;
  CHECK(bulk_gamma_star(z).value() == doctest::Approx(0.0));
  z << 2, 1, 2, 1, 0.5;
  CHECK(bulk_gamma_star(z).value() == doctest::Approx(0.5 - 0.5 * std::log(1.75)));
  z << 2, 1, 2.1, 1, 0.5;
  CHECK(bulk_gamma_star(z).is_inf());
  z << 1, 1, 1, 1, 1;
  CHECK(bulk_gamma_star(z).is_inf());
}

TEST_CASE("rate at the almost sure limit is zero") {
  Vec z(5);
  z << 1, 1, 1, 1, 0;
  for (int T : {1, 2}) {
    const auto r = rate_nonconvex(NonConvexScenario{1.5, 1.4, T}, z);
    CHECK(std::abs(r.value.value()) < 1e-12);
  }
}

TEST_CASE("rate at z* on the reference pair") {
  const Vec z = probe_point(1.4);
  const auto r2 = rate_nonconvex(NonConvexScenario{1.5, 1.4, 2}, z);
  const auto r1 = rate_nonconvex(NonConvexScenario{1.5, 1.4, 1}, z);
  REQUIRE(r2.value.is_finite());
  CHECK(r1.value.is_inf());
  CHECK_FALSE(r1.reason.empty());
  CHECK(r2.value.value() <= brute_rate_T2(1.5, 1.4, z) + 1e-9);
  CHECK(r2.value.value() == doctest::Approx(brute_rate_T2(1.5, 1.4, z)).epsilon(1e-4));
  // The reported split reproduces the value.
  CHECK(split_objective(NonConvexScenario{1.5, 1.4, 2}, z, r2.pieces).value() ==
        doctest::Approx(r2.value.value()).epsilon(1e-12));
}

TEST_CASE("search agrees with brute force off the probe point") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int rep = 0; rep < 5; ++rep) {
    Vec z(5);
    z << 0.5 + U(rng), 0.5 + U(rng), 0, 0, 0.4 * (U(rng) - 0.5);
    z[2] = z[0] + 0.3 * U(rng);
    z[3] = z[1] + 0.3 * U(rng);
    const double ref = brute_rate_T2(2.0, 1.5, z, 401);
    const auto r = rate_nonconvex(NonConvexScenario{2.0, 1.5, 2}, z);
    if (std::isinf(ref)) {
      CHECK(r.value.is_inf());
    } else {
      CHECK(r.value.value() <= ref + 1e-9);
      CHECK(r.value.value() == doctest::Approx(ref).epsilon(1e-3));
    }
  }
}

TEST_CASE("negative outlier masses are infeasible") {
  Vec z(5);
  z << 1, 1, 0.9, 1, 0;
  const auto r = rate_nonconvex(NonConvexScenario{1.5, 1.4, 2}, z);
  CHECK(r.value.is_inf());
  CHECK_FALSE(r.reason.empty());
}

TEST_CASE("system with one retained outlier") {
  const auto a = solve_system_barI(1.5, 1.4);
  CHECK_FALSE(a.feasible);
  CHECK_FALSE(a.witness);
  const auto b = solve_system_barI(3.0, 1.2);
  REQUIRE(b.feasible);
  CHECK(b.witness->x0 == doctest::Approx(0.9));
  CHECK_FALSE(solve_system_barI(2 * 1.3 - 1, 1.3).feasible);
  CHECK_THROWS_AS(solve_system_barI(1.2, 1.4), std::invalid_argument);
  CHECK_THROWS_AS(solve_system_barI(1.5, 0.9), std::invalid_argument);
}

TEST_CASE("system with both outliers") {
  const auto a = solve_system_I(1.5, 1.4);
  REQUIRE(a.feasible);
  CHECK(a.witness->x0 == doctest::Approx(1.0 / 9.0).epsilon(1e-14));
  CHECK(a.witness->x1 == doctest::Approx(4.0 / 9.0).epsilon(1e-14));
  const auto b = solve_system_I(3.0, 2.0);
  REQUIRE(b.feasible);
  CHECK(b.witness->x0 == doctest::Approx(1.0 / 3.0));
  CHECK(b.witness->x1 == doctest::Approx(1.0 / 3.0));
  CHECK(witness_residual(3.0, 2.0, *b.witness, true) <= 1e-12);
  CHECK(witness_residual(3.0, 2.0, *b.witness, false) <= 1e-12);
}

TEST_CASE("the closed-form witness bounds the rate but is not its minimizer") {
  const double k1 = 1.5, k2 = 1.4;
  const auto w = *solve_system_I(k1, k2).witness;
  const NonConvexScenario sc{k1, k2, 2};
  const Vec z = probe_point(k2);
  // witness split in (u, v) coordinates: y_l = (x_l, y_l, r_l) with f(kappa) scaling
  const std::vector<OutlierPiece> pieces{{w.x1, w.y1, w.eps1}, {w.x2, w.y2, w.eps2}};
  const ExtReal at_witness = split_objective(sc, z, pieces);
  REQUIRE(at_witness.is_finite());
  CHECK(at_witness.value() == doctest::Approx(-std::log(w.x0)));
  const auto r = rate_nonconvex(sc, z);
  CHECK(r.value.value() < at_witness.value() - 1e-3);
}

TEST_CASE("convex counterpart: exact containment") {
  std::mt19937 rng(23);
  std::uniform_int_distribution<int> D(-4, 4), P(1, 5);
  for (int rep = 0; rep < 10; ++rep) {
    RationalPolyhedron d0{3, {}, {}};
    for (int i = 0; i < 5; ++i) {
      d0.rows.push_back({Rational(D(rng)), Rational(D(rng)), Rational(D(rng))});
      d0.rhs.push_back(Rational(P(rng)));
    }
    CHECK(convex_counterpart_equal(d0, Rational(5, 2), Rational(3, 2)));
    CHECK(convex_counterpart_equal(d0, Rational(2), Rational(2)));
  }
  RationalPolyhedron d0{3, {{Rational(1), Rational(0), Rational(0)}}, {Rational(1)}};
  CHECK_THROWS_AS(convex_counterpart_equal(d0, Rational(3, 2), Rational(2)), std::invalid_argument);
}

TEST_CASE("convex counterpart: floating point with a law") {
  Vec a(3), b(3), c(3);
  a << 2, 0, 0;
  b << 0, 2, 0;
  c << 1, 1, 1;
  const GammaSumLaw law("g3", {{a, 0.5}, {b, 0.5}, {c, 1.0}});
  CHECK(convex_counterpart_equal(1.5, 1.4, law));
  CHECK_THROWS_AS(convex_counterpart_equal(1.5, 1.4, *make_law(BuiltInLaw::GaussCross)), UnsupportedDomainError);
}

TEST_CASE("scenario checks") {
  CHECK_THROWS(NonConvexScenario{1.4, 1.5, 2}.validate());
  CHECK_THROWS(NonConvexScenario{1.5, 1.4, 3}.validate());
  const auto sc = NonConvexScenario{1.5, 1.4, 2}.scenario();
  CHECK(sc.m() == 5);
  CHECK(sc.d() == 3);
}
