#include "ldrate/weight_arrays.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "ldrate/errors.hpp"

namespace ldrate {

DiscreteMeasure::DiscreteMeasure(std::vector<double> pts, std::vector<double> wts) {
  if (pts.empty() || pts.size() != wts.size())
    throw std::invalid_argument("DiscreteMeasure: need matching, nonempty atom and weight lists");
  std::map<double, double> merged;
  double total = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!std::isfinite(pts[i])) throw std::invalid_argument("DiscreteMeasure: atoms must be finite");
    if (!(wts[i] >= 0.0)) throw std::invalid_argument("DiscreteMeasure: weights must be nonnegative");
    merged[pts[i]] += wts[i];
    total += wts[i];
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw std::invalid_argument("DiscreteMeasure: weights sum to " + std::to_string(total) + ", expected 1");
  for (const auto& [p, w] : merged) {
    if (w == 0.0) continue;
    points_.push_back(p);
    weights_.push_back(w);
  }
}

double DiscreteMeasure::mean() const {
  double s = 0.0;
  for (std::size_t i = 0; i < points_.size(); ++i) s += points_[i] * weights_[i];
  return s;
}

double DiscreteMeasure::cdf(double x) const {
  double s = 0.0;
  for (std::size_t i = 0; i < points_.size() && points_[i] <= x; ++i) s += weights_[i];
  return std::min(s, 1.0);
}

double DiscreteMeasure::quantile(double u) const {
  if (!(u > 0.0 && u <= 1.0)) throw std::invalid_argument("quantile: u must lie in (0, 1]");
  double s = 0.0;
  for (std::size_t i = 0; i < points_.size(); ++i) {
    s += weights_[i];
    if (s >= u) return points_[i];
  }
  return points_.back();
}

double kolmogorov_distance(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  std::vector<double> xs = a.points();
  xs.insert(xs.end(), b.points().begin(), b.points().end());
  double d = 0.0;
  for (double x : xs) d = std::max(d, std::abs(a.cdf(x) - b.cdf(x)));
  return d;
}

SupportSet SupportSet::interval(double lo, double hi) {
  if (!(std::isfinite(lo) && std::isfinite(hi) && lo <= hi))
    throw std::invalid_argument("SupportSet: interval needs finite lo <= hi");
  SupportSet s;
  s.interval_ = true;
  s.lo_ = lo;
  s.hi_ = hi;
  return s;
}

SupportSet SupportSet::atoms(std::vector<double> pts) {
  if (pts.empty()) throw std::invalid_argument("SupportSet: empty atom set");
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  SupportSet s;
  s.interval_ = false;
  s.lo_ = pts.front();
  s.hi_ = pts.back();
  s.atoms_ = std::move(pts);
  return s;
}

double SupportSet::distance(double x) const { return std::abs(x - project(x)); }

double SupportSet::project(double x) const {
  if (interval_) return std::clamp(x, lo_, hi_);
  double best = atoms_.front();
  for (double a : atoms_)
    if (std::abs(a - x) < std::abs(best - x)) best = a;
  return best;
}

double OutlierTrack::limit(long n) const {
  if (limits.empty()) throw std::invalid_argument("track '" + name + "' has no limits");
  return limits[static_cast<std::size_t>(n % period())];
}

double OutlierTrack::value(long n) const {
  const double base = limit(n);
  if (amplitude == 0.0) return base;
  return base + amplitude * std::pow(static_cast<double>(n), -approach_rate);
}

void WeightArraySpec::validate() const {
  for (double p : bulk.points())
    if (support.distance(p) > 0.0)
      throw std::invalid_argument("bulk atom " + std::to_string(p) + " lies outside the support");
  for (const auto& t : tracks) {
    if (t.limits.empty()) throw std::invalid_argument("track '" + t.name + "' has no limits");
    for (double l : t.limits)
      if (!std::isfinite(l)) throw std::invalid_argument("track '" + t.name + "' has a non-finite limit");
    if (!std::isfinite(t.amplitude)) throw std::invalid_argument("track '" + t.name + "' has a non-finite amplitude");
    if (t.amplitude != 0.0 && !(t.approach_rate > 0.0))
      throw std::invalid_argument("track '" + t.name + "' needs a positive approach rate");
  }
}

int WeightArraySpec::period() const {
  int p = 1;
  for (const auto& t : tracks) p = std::lcm(p, t.period());
  return p;
}

WeightFunction::WeightFunction(Mat base, Mat slope) : base_(std::move(base)), slope_(std::move(slope)) {
  if (base_.rows() != slope_.rows() || base_.cols() != slope_.cols() || base_.size() == 0)
    throw std::invalid_argument("WeightFunction: base and slope must have the same nonempty shape");
}

WeightFunction WeightFunction::identity_scalar() { return WeightFunction(Mat::Zero(1, 1), Mat::Ones(1, 1)); }

WeightFunction WeightFunction::diag_one_x() {
  Mat b = Mat::Zero(2, 2), s = Mat::Zero(2, 2);
  b(0, 0) = 1.0;
  s(1, 1) = 1.0;
  return WeightFunction(b, s);
}

WeightFunction WeightFunction::spiked5x3() {
  Mat b = Mat::Zero(5, 3), s = Mat::Zero(5, 3);
  b(0, 0) = 1.0;
  b(1, 1) = 1.0;
  b(4, 2) = 1.0;
  s(2, 0) = 1.0;
  s(3, 1) = 1.0;
  return WeightFunction(b, s);
}

std::vector<double> points(const WeightArraySpec& spec, long n) {
  const long t = static_cast<long>(spec.tracks.size());
  if (n < t || n < 1) throw std::invalid_argument("points: n must be at least the number of tracks and positive");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n));
  for (const auto& tr : spec.tracks) out.push_back(tr.value(n));
  const long nb = n - t;
  for (long j = 0; j < nb; ++j) out.push_back(spec.bulk.quantile((static_cast<double>(j) + 0.5) / static_cast<double>(nb)));
  return out;
}

DiscreteMeasure empirical_measure(const WeightArraySpec& spec, long n) {
  const auto pts = points(spec, n);
  std::vector<double> w(pts.size(), 1.0 / static_cast<double>(n));
  return DiscreteMeasure(pts, std::move(w));
}

long cubic_schedule(long m) { return m * m * m; }

Decomposition decompose(const WeightArraySpec& spec, long n, const BlowupSchedule& schedule) {
  Decomposition d;
  long m = 1;
  while (m < 1000000 && schedule(m + 1) <= n) ++m;
  d.level = m;
  const auto pts = points(spec, n);
  const double radius = 1.0 / static_cast<double>(m);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double dist = spec.support.distance(pts[i]);
    if (dist < radius) {
      d.bulk.push_back(static_cast<long>(i) + 1);
      d.max_bulk_distance = std::max(d.max_bulk_distance, dist);
    } else {
      d.outliers.push_back(static_cast<long>(i) + 1);
    }
  }
  return d;
}

double project_to_support(const WeightArraySpec& spec, double x) { return spec.support.project(x); }

namespace {

bool contains_matrix(const std::vector<Mat>& set, const Mat& y) {
  return std::any_of(set.begin(), set.end(), [&](const Mat& s) { return (s - y).cwiseAbs().maxCoeff() <= kTrackTolerance; });
}

}  // namespace

LimitSets limit_sets(const WeightArraySpec& spec, const WeightFunction& f, long horizon) {
  const int p = spec.period();
  if (horizon < p) throw std::invalid_argument("limit_sets: horizon shorter than the alternation period");
  LimitSets out;
  out.rows = f.rows();
  out.cols = f.cols();
  out.classes.resize(static_cast<std::size_t>(p));
  for (const auto& tr : spec.tracks) {
    for (int r = 0; r < p; ++r) {
      // Largest n <= horizon in residue class r.
      const long n = horizon - ((horizon - r) % p + p) % p;
      const double lim = tr.limit(n);
      if (std::abs(tr.value(n) - lim) > kTrackTolerance)
        throw DiagnosticError("track '" + tr.name + "' has not converged to its declared limit by the horizon");
      if (spec.support.distance(lim) <= 0.0) continue;
      const Mat y = f(lim);
      auto& cls = out.classes[static_cast<std::size_t>(r)];
      if (!contains_matrix(cls, y)) cls.push_back(y);
    }
  }
  for (const auto& cls : out.classes)
    for (const auto& y : cls)
      if (!contains_matrix(out.outer, y)) out.outer.push_back(y);
  for (const auto& y : out.outer) {
    const bool everywhere =
        std::all_of(out.classes.begin(), out.classes.end(), [&](const auto& cls) { return contains_matrix(cls, y); });
    if (everywhere) out.inner.push_back(y);
  }
  out.converged = out.inner.size() == out.outer.size();
  return out;
}

namespace {

HalfspaceDomain intersect_pullbacks(const HalfspaceDomain& dz, const std::vector<Mat>& ys, int m) {
  HalfspaceDomain acc = HalfspaceDomain::whole_space(m);
  for (const auto& y : ys) acc = acc.intersect(dz.pullback(y));
  return acc;
}

}  // namespace

A4Check check_a4(const LimitSets& limits, const ParticleLaw& law) {
  const HalfspaceDomain* dz = law.polyhedral_domain();
  if (dz == nullptr) throw UnsupportedDomainError("check_a4: law '" + law.name() + "' has no polyhedral domain");
  if (limits.cols != law.dim())
    throw std::invalid_argument("check_a4: weight matrices have " + std::to_string(limits.cols) +
                                " columns, law dimension is " + std::to_string(law.dim()));
  const int m = limits.rows;
  A4Check out;
  out.empty_inner = limits.inner.empty();
  out.inner_domain = intersect_pullbacks(*dz, limits.inner, m);
  out.outer_domain = intersect_pullbacks(*dz, limits.outer, m);
  // The outer intersection is always contained in the inner one.
  out.holds = out.inner_domain->subset_of(*out.outer_domain);
  if (out.holds) return out;
  for (const auto& cls : limits.classes) {
    const auto d = intersect_pullbacks(*dz, cls, m);
    if (auto w = d.witness_not_in(*out.outer_domain)) {
      out.witness = *w;
      return out;
    }
  }
  out.witness = out.inner_domain->witness_not_in(*out.outer_domain);
  return out;
}

}  // namespace ldrate
