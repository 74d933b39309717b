#pragma once

// Two-dimensional Gaussian example: L_n = (1/n) sum_i (X_i^2, x_i^n X_i^2)
// with bulk weights distributed as R (support [m, M]) and two outliers at
// x_min < m and x_max > M. Closed-form four-region rate, rays of
// non-exposed points and the rank-one spherical integral limit.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ldrate/rate_engine.hpp"
#include "ldrate/weight_arrays.hpp"

namespace ldrate {

class Gauss2DParams {
 public:
  Gauss2DParams(DiscreteMeasure R, double x_min, double x_max);
  // R = (delta_{-1} + delta_1)/2, x_min = -4, x_max = 4.
  static Gauss2DParams standard();

  const DiscreteMeasure& R() const { return R_; }
  double m() const { return R_.points().front(); }
  double M() const { return R_.points().back(); }
  double x_min() const { return x_min_; }
  double x_max() const { return x_max_; }
  double H_min() const { return H_min_; }
  double H_max() const { return H_max_; }
  double alpha_min() const { return alpha_min_; }
  double alpha_max() const { return alpha_max_; }

  // ChiSqPair law, f(x) = diag(1, x), outlier tracks at x_min and x_max.
  Scenario scenario() const;

 private:
  DiscreteMeasure R_;
  double x_min_, x_max_;
  double H_min_, H_max_, alpha_min_, alpha_max_;
};

// int R(dx) / (t - x); t must lie outside [m, M].
double hilbert(const DiscreteMeasure& R, double t);
double hilbert(const Gauss2DParams& p, double t);

enum class Region { Infinite, GammaStar, LinearPlus, LinearMinus };
std::string to_string(Region r);

// D_inf is tested first, so the ray y = x_max x (claimed by both D_inf and
// D_lin+) is classified infinite; likewise y = x_min x.
Region classify(const Gauss2DParams& p, double x, double y);

class Gauss2D {
 public:
  explicit Gauss2D(Gauss2DParams params);

  const Gauss2DParams& params() const { return params_; }
  const RateEngine& engine() const { return engine_; }

  RateReport rate_closed_form(double x, double y) const;

  struct RayReport {
    std::vector<double> t;
    std::vector<double> increments;  // I_f(x0 + t, y(x0 + t)) - I_f(x0, y(x0)) from the dual route
    std::vector<double> expected;    // t / 2
    double base_value = 0.0;         // Gamma*(x0, alpha x0)
    double max_error = 0.0;
  };
  // side = +1 for the y+ ray, -1 for the y- ray.
  RayReport ray_linearity_check(double x0, int side, const std::vector<double>& t_values) const;

  // sup_{x > 0, y} theta y / x - I_f(x, y).
  double spherical_rank_one(double theta) const;

  struct MapRow {
    double x, y;
    Region region;
    ExtReal value;
    bool boundary;  // on one of the four bounding rays
  };
  std::vector<MapRow> region_map(double x_lo, double x_hi, int nx, double y_lo, double y_hi, int ny) const;

 private:
  Gauss2DParams params_;
  RateEngine engine_;
};

void write_region_map(std::ostream& os, const std::vector<Gauss2D::MapRow>& rows);

}  // namespace ldrate
