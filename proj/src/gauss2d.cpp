#include "ldrate/gauss2d.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

#include "ldrate/optimize1d.hpp"

namespace ldrate {

double hilbert(const DiscreteMeasure& R, double t) {
  if (t >= R.points().front() && t <= R.points().back())
    throw std::invalid_argument("hilbert: t = " + std::to_string(t) + " lies inside the support hull");
  double s = 0.0;
  for (std::size_t i = 0; i < R.size(); ++i) s += R.weights()[i] / (t - R.points()[i]);
  return s;
}

double hilbert(const Gauss2DParams& p, double t) { return hilbert(p.R(), t); }

Gauss2DParams::Gauss2DParams(DiscreteMeasure R, double x_min, double x_max)
    : R_(std::move(R)), x_min_(x_min), x_max_(x_max) {
  if (!(x_min_ < m() && x_max_ > M()))
    throw std::invalid_argument("Gauss2DParams: need x_min < m and x_max > M");
  H_min_ = hilbert(R_, x_min_);
  H_max_ = hilbert(R_, x_max_);
  alpha_min_ = x_min_ - 1.0 / H_min_;
  alpha_max_ = x_max_ - 1.0 / H_max_;
}

Gauss2DParams Gauss2DParams::standard() { return Gauss2DParams(DiscreteMeasure({-1.0, 1.0}, {0.5, 0.5}), -4.0, 4.0); }

Scenario Gauss2DParams::scenario() const {
  WeightArraySpec spec{R_,
                       {OutlierTrack{"x_min", {x_min_}}, OutlierTrack{"x_max", {x_max_}}},
                       SupportSet::interval(m(), M())};
  return Scenario(make_law(BuiltInLaw::ChiSqPair), spec, WeightFunction::diag_one_x());
}

std::string to_string(Region r) {
  switch (r) {
    case Region::Infinite:
      return "D_INF";
    case Region::GammaStar:
      return "D_GAMMA_STAR";
    case Region::LinearPlus:
      return "D_LIN_PLUS";
    case Region::LinearMinus:
      return "D_LIN_MINUS";
  }
  return "unknown";
}

Region classify(const Gauss2DParams& p, double x, double y) {
  if (x <= 0.0 || y >= p.x_max() * x || y <= p.x_min() * x) return Region::Infinite;
  if (p.alpha_min() * x <= y && y <= p.alpha_max() * x) return Region::GammaStar;
  if (y > p.alpha_max() * x) return Region::LinearPlus;
  return Region::LinearMinus;
}

Gauss2D::Gauss2D(Gauss2DParams params) : params_(std::move(params)), engine_(params_.scenario()) {}

RateReport Gauss2D::rate_closed_form(double x, double y) const {
  RateReport rep;
  rep.route = Route::ClosedForm;
  const Region region = classify(params_, x, y);
  rep.region = to_string(region);
  Vec z(2);
  z << x, y;
  if (region == Region::Infinite) {
    rep.value = ExtReal::infinity();
    return rep;
  }
  Vec zs = z;
  if (region != Region::GammaStar) {
    const bool plus = region == Region::LinearPlus;
    const double H = plus ? params_.H_max() : params_.H_min();
    const double xe = plus ? params_.x_max() : params_.x_min();
    const double a = plus ? params_.alpha_max() : params_.alpha_min();
    const double u = H * (xe * x - y);
    zs << u, a * u;
  }
  const ConjugateValue gs = engine_.gamma_star(zs);
  if (gs.value.is_inf()) {
    rep.value = ExtReal::infinity();
    return rep;
  }
  double value = gs.value.value();
  if (region == Region::LinearPlus)
    value += 0.5 * ((1.0 - params_.H_max() * params_.x_max()) * x + params_.H_max() * y);
  if (region == Region::LinearMinus)
    value += 0.5 * ((1.0 - params_.H_min() * params_.x_min()) * x + params_.H_min() * y);
  rep.value = value;
  rep.z_star = zs;
  rep.z_n = Vec(z - zs);
  rep.lambda_star = gs.lambda_star;
  return rep;
}

Gauss2D::RayReport Gauss2D::ray_linearity_check(double x0, int side, const std::vector<double>& t_values) const {
  if (!(x0 > 0.0)) throw std::invalid_argument("ray_linearity_check: x0 must be positive");
  if (side != 1 && side != -1) throw std::invalid_argument("ray_linearity_check: side must be +1 or -1");
  const double xe = side > 0 ? params_.x_max() : params_.x_min();
  const double a = side > 0 ? params_.alpha_max() : params_.alpha_min();
  auto ray = [&](double x) {
    Vec z(2);
    z << x, xe * x + (a - xe) * x0;
    return z;
  };
  RayReport rep;
  const ExtReal base = engine_.rate(ray(x0), Route::DualSup).value;
  Vec z0(2);
  z0 << x0, a * x0;
  rep.base_value = engine_.gamma_star(z0).value.to_double();
  for (double t : t_values) {
    const ExtReal v = engine_.rate(ray(x0 + t), Route::DualSup).value;
    const double inc = (v.is_inf() || base.is_inf()) ? kInf : v.value() - base.value();
    rep.t.push_back(t);
    rep.increments.push_back(inc);
    rep.expected.push_back(0.5 * t);
    rep.max_error = std::max(rep.max_error, std::abs(inc - 0.5 * t));
  }
  // Anchor: the ray starts on the boundary of the Gamma* region.
  if (base.is_finite()) rep.max_error = std::max(rep.max_error, std::abs(base.value() - rep.base_value));
  return rep;
}

double Gauss2D::spherical_rank_one(double theta) const {
  constexpr double kSlopeMargin = 1e-6;
  auto inner = [&](double s) {
    // min over x > 0 of I_f(x, s x); convex in x.
    auto h = [&](double x) {
      if (x <= 0.0) return kInf;
      return rate_closed_form(x, s * x).value.to_double();
    };
    const Min1D r = minimize_halfline(h, [](double) { return 1e3; });
    return r.value;
  };
  auto neg = [&](double s) {
    const double v = inner(s);
    return std::isfinite(v) ? -(theta * s - v) : kInf;
  };
  const Min1D r = minimize_interval(neg, params_.x_min() + kSlopeMargin, params_.x_max() - kSlopeMargin, 48, 1e-10);
  return -r.value;
}

std::vector<Gauss2D::MapRow> Gauss2D::region_map(double x_lo, double x_hi, int nx, double y_lo, double y_hi,
                                                 int ny) const {
  if (nx < 1 || ny < 1) throw std::invalid_argument("region_map: counts must be positive");
  std::vector<MapRow> rows;
  for (int i = 0; i < nx; ++i) {
    const double x = nx == 1 ? x_lo : x_lo + (x_hi - x_lo) * i / (nx - 1);
    for (int j = 0; j < ny; ++j) {
      const double y = ny == 1 ? y_lo : y_lo + (y_hi - y_lo) * j / (ny - 1);
      const Region reg = classify(params_, x, y);
      const bool boundary = x > 0.0 && (y == params_.x_max() * x || y == params_.x_min() * x ||
                                        y == params_.alpha_max() * x || y == params_.alpha_min() * x);
      rows.push_back({x, y, reg, rate_closed_form(x, y).value, boundary});
    }
  }
  return rows;
}

void write_region_map(std::ostream& os, const std::vector<Gauss2D::MapRow>& rows) {
  os << "x,y,region,value,boundary\n";
  os << std::setprecision(17);
  for (const auto& r : rows)
    os << r.x << ',' << r.y << ',' << to_string(r.region) << ',' << r.value << ',' << (r.boundary ? 1 : 0) << '\n';
}

}  // namespace ldrate
