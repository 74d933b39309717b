#pragma once

// Deterministic triangular weight arrays {x_i^n}: quantile points of a bulk
// measure R plus finitely many outlier tracks, the bulk/outlier split, and
// the inner/outer limits of the outlier weight sets.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ldrate/convex_kit.hpp"
#include "ldrate/particle_laws.hpp"
#include "ldrate/types.hpp"

namespace ldrate {

// Finitely supported probability measure on the real line. Atoms are kept
// sorted; weights are nonnegative and sum to one within 1e-12.
class DiscreteMeasure {
 public:
  DiscreteMeasure(std::vector<double> points, std::vector<double> weights);
  static DiscreteMeasure dirac(double x) { return DiscreteMeasure({x}, {1.0}); }

  const std::vector<double>& points() const { return points_; }
  const std::vector<double>& weights() const { return weights_; }
  std::size_t size() const { return points_.size(); }

  double mean() const;
  double cdf(double x) const;
  // Smallest atom whose cumulative weight reaches u, u in (0, 1].
  double quantile(double u) const;

 private:
  std::vector<double> points_;
  std::vector<double> weights_;
};

double kolmogorov_distance(const DiscreteMeasure& a, const DiscreteMeasure& b);

// Closed interval [lo, hi] or finite atom set.
class SupportSet {
 public:
  static SupportSet interval(double lo, double hi);
  static SupportSet atoms(std::vector<double> pts);

  bool is_interval() const { return interval_; }
  double lower() const { return lo_; }
  double upper() const { return hi_; }
  const std::vector<double>& atom_points() const { return atoms_; }

  bool contains(double x) const { return distance(x) == 0.0; }
  double distance(double x) const;
  double project(double x) const;

 private:
  bool interval_ = true;
  double lo_ = 0.0;
  double hi_ = 0.0;
  std::vector<double> atoms_;
};

// Outlier track: x^n = limits[n mod period] + amplitude * n^(-approach_rate).
struct OutlierTrack {
  std::string name;
  std::vector<double> limits;
  double amplitude = 0.0;
  double approach_rate = 1.0;

  int period() const { return static_cast<int>(limits.size()); }
  double limit(long n) const;
  double value(long n) const;
};

struct WeightArraySpec {
  DiscreteMeasure bulk;
  std::vector<OutlierTrack> tracks;
  SupportSet support;

  // Validates atoms against the support and the track descriptions.
  void validate() const;
  // Least common multiple of the track periods.
  int period() const;
};

// Affine matrix pencil f(x) = base + x * slope (m x d). Every weight map
// used here (scalar, diag(1,x), the 5x3 spiked map) has this form.
class WeightFunction {
 public:
  WeightFunction(Mat base, Mat slope);
  static WeightFunction identity_scalar();
  static WeightFunction diag_one_x();
  static WeightFunction spiked5x3();

  Mat operator()(double x) const { return base_ + x * slope_; }
  int rows() const { return static_cast<int>(base_.rows()); }
  int cols() const { return static_cast<int>(base_.cols()); }
  const Mat& base() const { return base_; }
  const Mat& slope() const { return slope_; }

 private:
  Mat base_;
  Mat slope_;
};

// Exactly n points: the track values for this n, then n - T bulk quantile points.
std::vector<double> points(const WeightArraySpec& spec, long n);

// Empirical measure of points(spec, n) with coincident points merged.
DiscreteMeasure empirical_measure(const WeightArraySpec& spec, long n);

using BlowupSchedule = std::function<long(long)>;
// psi_m = m^3.
long cubic_schedule(long m);

struct Decomposition {
  std::vector<long> bulk;      // 1-based indices with x_i^n inside the blowup
  std::vector<long> outliers;  // the rest
  long level = 1;              // m with psi_m <= n < psi_{m+1}
  double max_bulk_distance = 0.0;
};

Decomposition decompose(const WeightArraySpec& spec, long n, const BlowupSchedule& schedule = cubic_schedule);

double project_to_support(const WeightArraySpec& spec, double x);

// Inner and outer limits of the outlier weight sets {f(x_i^n) : i outlier}.
struct LimitSets {
  int rows = 0;
  int cols = 0;
  std::vector<Mat> inner;
  std::vector<Mat> outer;
  // Limit set along each residue class n = r mod period.
  std::vector<std::vector<Mat>> classes;
  bool converged = false;
};

inline constexpr double kTrackTolerance = 1e-9;

LimitSets limit_sets(const WeightArraySpec& spec, const WeightFunction& f, long horizon);

struct A4Check {
  bool holds = false;
  std::optional<Vec> witness;  // in the inner intersection, not in the outer one
  std::optional<HalfspaceDomain> inner_domain;
  std::optional<HalfspaceDomain> outer_domain;
  bool empty_inner = false;    // inner intersection taken over the empty set (all of R^m)
};

A4Check check_a4(const LimitSets& limits, const ParticleLaw& law);

}  // namespace ldrate
