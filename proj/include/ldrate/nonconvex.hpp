#pragma once

// Spiked model with Z = (X^2, Y^2, XY), f(x) = [1 0 0; 0 1 0; x 0 0; 0 x 0; 0 0 1],
// bulk weights at 1 and outliers kappa1 > kappa2 > 1. Keeping both outliers
// (T = 2) or only the largest (T = 1) changes the rate function.

#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "ldrate/convex_kit.hpp"
#include "ldrate/ext_real.hpp"
#include "ldrate/particle_laws.hpp"
#include "ldrate/rate_engine.hpp"
#include "ldrate/types.hpp"

namespace ldrate {

struct NonConvexScenario {
  double kappa1 = 1.5;
  double kappa2 = 1.4;
  int T = 2;

  void validate() const;
  std::vector<double> outliers() const;
  // Weight array: tracks kappa1 (and kappa2 if T = 2), bulk delta_1.
  Scenario scenario() const;
};

// (1, 1, kappa2, kappa2, 0)
Vec probe_point(double kappa2);

// Bulk conjugate: (x+y)/2 - 1 - log(xy - r^2)/2 when x' = x, y' = y, r^2 < xy.
ExtReal bulk_gamma_star(const Vec& z0);

struct OutlierPiece {
  double u = 0.0;
  double v = 0.0;
  int sign = 1;  // r = sign * sqrt(u v)
};

struct NonConvexRate {
  ExtReal value;
  Vec z0;                            // bulk part of the best split found
  std::vector<OutlierPiece> pieces;  // one per retained outlier
  std::string reason;                // why the value is infinite
};

// Upper bound on the rate by enumerating sign branches and 32 local
// searches seeded from a grid over the feasible split set.
NonConvexRate rate_nonconvex(const NonConvexScenario& sc, const Vec& z);

// Objective of a given split (u, v, signs); +inf if the bulk part is infeasible.
ExtReal split_objective(const NonConvexScenario& sc, const Vec& z, const std::vector<OutlierPiece>& pieces);

struct FeasibilityWitness {
  double x0 = 0, y0 = 0, r0 = 0;
  double x1 = 0, y1 = 0, x2 = 0, y2 = 0;
  int eps1 = 0, eps2 = 0;
};

struct FeasibilityResult {
  bool feasible = false;
  std::optional<FeasibilityWitness> witness;
  std::string reason;
};

// Single retained outlier at z* = (1,1,kappa2,kappa2,0).
FeasibilityResult solve_system_barI(double kappa1, double kappa2);
// Both outliers at z*; closed-form witness, checked equation by equation.
FeasibilityResult solve_system_I(double kappa1, double kappa2);

// Largest residual of the split equations at a witness. `literal` uses the
// squared form r0^2 + eps1 x1 y1 + eps2 x2 y2 = 0, otherwise the signed-root
// form r0 + eps1 sqrt(x1 y1) + eps2 sqrt(x2 y2) = 0.
double witness_residual(double kappa1, double kappa2, const FeasibilityWitness& w, bool literal);

// Exact polyhedra for the convex counterpart.
using Rational = boost::multiprecision::cpp_rational;

struct RationalPolyhedron {
  int dim = 0;
  std::vector<std::vector<Rational>> rows;  // rows x <= rhs (closure)
  std::vector<Rational> rhs;
};

// {lambda in R^5 : f(kappa)^T lambda in D0}, D0 in R^3.
RationalPolyhedron spiked_pullback(const RationalPolyhedron& D0, const Rational& kappa);
RationalPolyhedron intersect(const RationalPolyhedron& a, const RationalPolyhedron& b);
// sup <c, x> over the polyhedron; nullopt when unbounded.
std::optional<Rational> sup_exact(const RationalPolyhedron& P, const std::vector<Rational>& c);
bool contains_exact(const RationalPolyhedron& inner, const RationalPolyhedron& outer);

// D0(1) ∩ D0(kappa1) ⊆ D0(kappa2), exactly.
bool convex_counterpart_equal(const RationalPolyhedron& D0, const Rational& kappa1, const Rational& kappa2);
// Same check in floating point for a law with a polyhedral domain in R^3.
bool convex_counterpart_equal(double kappa1, double kappa2, const ParticleLaw& law);

}  // namespace ldrate
