#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "ldrate/convex_kit.hpp"
#include "ldrate/errors.hpp"
#include "oracles.hpp"

using namespace ldrate;

namespace {

HalfspaceDomain box_with_cut(double cut) {
  std::vector<Halfspace> h;
  for (int a = 0; a < 2; ++a) {
    Vec e = Vec::Zero(2);
    e[a] = 1.0;
    h.push_back({e, 1.0});
    h.push_back({-e, 1.0});
  }
  Vec n(2);
  n << 1.0, 1.0;
  h.push_back({n, cut});
  return HalfspaceDomain(2, h);
}

}  // namespace

TEST_CASE("halfspace domain membership") {
  const auto d = box_with_cut(1.0);
  Vec x(2);
  x << 0.2, 0.2;
  CHECK(d.contains(x));
  x << 0.5, 0.5;
  CHECK_FALSE(d.contains(x));  // open
  CHECK(d.in_closure(x, 0.0));
  CHECK(d.max_violation(x) == doctest::Approx(0.0));
  CHECK(d.contains(d.interior_point()));
  CHECK_THROWS(HalfspaceDomain(1, {{Vec::Constant(1, 1.0), 0.0}, {Vec::Constant(1, -1.0), 0.0}}));
}

TEST_CASE("support function against vertex enumeration") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int rep = 0; rep < 30; ++rep) {
    std::vector<Halfspace> h;
    Eigen::MatrixXd A(8, 2);
    Eigen::VectorXd b(8);
    for (int i = 0; i < 8; ++i) {
      Vec n(2);
      n << U(rng), U(rng);
      const double bound = 0.5 + std::abs(U(rng));
      h.push_back({n, bound});
      A.row(i) = n.transpose();
      b[i] = bound;
    }
    // bounding box keeps the set compact
    Eigen::MatrixXd Ab(12, 2);
    Eigen::VectorXd bb(12);
    Ab.topRows(8) = A;
    bb.head(8) = b;
    Ab.bottomRows(4) << 1, 0, -1, 0, 0, 1, 0, -1;
    bb.tail(4).setConstant(3.0);
    for (int i = 8; i < 12; ++i) h.push_back({Ab.row(i).transpose(), 3.0});
    const HalfspaceDomain d(2, h);
    const auto verts = oracle::vertices(Ab, bb);
    Vec z(2);
    z << U(rng), U(rng);
    double best = -1e300;
    for (const auto& v : verts) best = std::max(best, z.dot(v));
    CHECK(support_function(d, z).value() == doctest::Approx(best).epsilon(1e-9));
    CHECK(support_function_open(d, z).value() == doctest::Approx(best).epsilon(1e-9));
  }
}

TEST_CASE("support function detects unbounded directions") {
  const HalfspaceDomain half(2, {{Vec::Unit(2, 0), 1.0}});
  CHECK(support_function(half, Vec::Unit(2, 1)).is_inf());
  CHECK(support_function(half, Vec::Unit(2, 0)).value() == doctest::Approx(1.0));
  CHECK(support_function(HalfspaceDomain::whole_space(2), Vec::Zero(2)).value() == 0.0);
}

TEST_CASE("reduction, pullback and inclusion") {
  const auto d = box_with_cut(5.0);  // cut redundant
  CHECK(d.reduced().constraints().size() == 4);
  Mat y(2, 2);
  y << 2, 0, 0, 1;
  const auto p = d.pullback(y);
  Vec x(2);
  x << 0.45, 0.0;  // y^T x = (0.9, 0)
  CHECK(p.contains(x));
  CHECK(p.subset_of(d));
  CHECK_FALSE(d.subset_of(p));
  const auto w = d.witness_not_in(p);
  REQUIRE(w);
  CHECK(d.contains(*w));
  CHECK_FALSE(p.contains(*w));
}

TEST_CASE("normal cone certificates") {
  const auto d = box_with_cut(1.0);
  Vec corner(2);
  corner << 1.0, 0.0;  // x = 1 and x + y = 1 active
  const auto cone = normal_cone(d, corner);
  CHECK(cone.generators.size() == 2);
  Vec v(2);
  v << 2.0, 1.0;
  CHECK(in_cone(cone, v));
  v << -1.0, 0.0;
  CHECK_FALSE(in_cone(cone, v));
  Vec inner = Vec::Zero(2);
  CHECK(normal_cone(d, inner).generators.empty());
  CHECK(indicator(d, corner).value() == 0.0);
  corner << 2.0, 0.0;
  CHECK(indicator(d, corner).is_inf());
}

TEST_CASE("discrete conjugate of a quadratic") {
  const GridBox box{{-3.0}, {3.0}, {601}};
  const auto g = GridFunction::sample(box, [](const Vec& x) { return ExtReal(0.5 * x[0] * x[0]); });
  const GridBox out{{-2.0}, {2.0}, {201}};
  const auto c = legendre_conjugate(g, out);
  const double tol = conjugation_tolerance(box, out);
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double z = c.node(i)[0];
    CHECK(std::abs(c.value(i).value() - 0.5 * z * z) <= tol);
  }
}

TEST_CASE("conjugate of the chi-square log-Laplace transform") {
  const GridBox box{{-20.0}, {0.4999}, {200001}};
  const auto g = GridFunction::sample(box, [](const Vec& t) { return ExtReal(-0.5 * std::log(1 - 2 * t[0])); });
  const GridBox out{{0.3}, {3.0}, {28}};
  const auto c = legendre_conjugate(g, out);
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double z = c.node(i)[0];
    CHECK(c.value(i).value() == doctest::Approx(0.5 * (z - 1 - std::log(z))).epsilon(1e-3));
  }
}

TEST_CASE("grid infimal convolution of quadratics") {
  const GridBox box{{-2.0}, {2.0}, {81}};
  auto q = [](double a) { return [a](const Vec& x) { return ExtReal(0.5 * a * x[0] * x[0]); }; };
  const auto f = GridFunction::sample(box, q(1.0));
  const auto g = GridFunction::sample(box, q(3.0));
  const auto h = inf_convolution(f, g);
  // (a/2 x^2) box (b/2 x^2) = (ab/(a+b))/2 x^2
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double z = h.node(i)[0];
    if (std::abs(z) > 2.0) continue;
    CHECK(h.value(i).value() == doctest::Approx(0.375 * z * z).epsilon(1e-2).scale(1.0));
  }
}

TEST_CASE("grid csv round trip") {
  const GridBox box{{0.0, -1.0}, {1.0, 1.0}, {3, 4}};
  auto g = GridFunction::sample(box, [](const Vec& x) { return x[0] > 0.9 ? ExtReal::infinity() : ExtReal(x[0] + 2 * x[1]); });
  std::stringstream ss;
  write_csv(ss, g);
  const auto back = read_csv(ss);
  REQUIRE(back.size() == g.size());
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(back.raw_values()[i] == g.raw_values()[i]);
}

TEST_CASE("subgradient checks") {
  auto fn = [](const Vec& x) { return ExtReal(x.squaredNorm()); };
  Vec l(2), z(2);
  l << 0.5, -1.0;
  z << 1.0, -2.0;
  CHECK(verify_subgradient(fn, l, z, 1e-6));
  z[0] = 1.1;
  CHECK_FALSE(verify_subgradient(fn, l, z, 1e-6));
  auto edge = [](const Vec& x) { return x[0] < 1.0 ? ExtReal(x[0]) : ExtReal::infinity(); };
  CHECK_THROWS_AS(verify_subgradient(edge, Vec::Constant(1, 1.0 - 1e-9), Vec::Constant(1, 1.0), 1e-6), DiagnosticError);
}
