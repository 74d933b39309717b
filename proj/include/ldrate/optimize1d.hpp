#pragma once

// One-dimensional minimization of convex extended-real functions. +inf
// values are allowed; the search keeps the best finite point seen.

#include <functional>

namespace ldrate {

struct Min1D {
  double t = 0.0;
  double value = 0.0;  // +inf when no finite value was found
};

// Golden-section search on [a, b] seeded with a known point t0 in [a, b].
Min1D golden_minimize(const std::function<double(double)>& h, double a, double b, double t0, double f0,
                      double rel_tol = 1e-11);

// Minimization on [0, inf): geometric scan from 1e-6 until `upper(best)`
// is exceeded, then golden section around the best scanned point.
Min1D minimize_halfline(const std::function<double(double)>& h, const std::function<double(double)>& upper);

// Minimization on [a, b] from a uniform scan with `scan` interior nodes.
Min1D minimize_interval(const std::function<double(double)>& h, double a, double b, int scan = 24,
                        double rel_tol = 1e-11);

struct ValueSlope {
  double value = 0.0;  // +inf outside the effective domain
  double slope = 0.0;  // derivative (any subgradient); NaN if unknown
};

// Minimization of a convex function on [lo, hi] (hi may be +inf) given its
// derivative: safeguarded false position on the sign change of the slope.
// Falls back to golden section when slopes are unavailable.
Min1D minimize_convex_slope(const std::function<ValueSlope(double)>& h, double lo, double hi);

}  // namespace ldrate
