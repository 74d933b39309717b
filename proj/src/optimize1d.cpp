#include "ldrate/optimize1d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace ldrate {

namespace {

constexpr double kPhi = 0.6180339887498949;
constexpr double kInfinity = std::numeric_limits<double>::infinity();

Min1D bracket_and_refine(const std::function<double(double)>& h, const std::vector<double>& ts,
                         const std::vector<double>& vs, double rel_tol) {
  std::size_t ib = 0;
  for (std::size_t i = 1; i < vs.size(); ++i)
    if (vs[i] < vs[ib]) ib = i;
  if (!std::isfinite(vs[ib])) return {ts[ib], kInfinity};
  const double a = ts[ib == 0 ? 0 : ib - 1];
  const double b = ts[std::min(ib + 1, ts.size() - 1)];
  return golden_minimize(h, a, b, ts[ib], vs[ib], rel_tol);
}

}  // namespace

Min1D golden_minimize(const std::function<double(double)>& h, double a, double b, double t0, double f0,
                      double rel_tol) {
  Min1D out{t0, f0};
  auto record = [&](double t, double v) {
    if (v < out.value) out = {t, v};
  };
  double c = b - kPhi * (b - a), d = a + kPhi * (b - a);
  double fc = h(c), fd = h(d);
  record(c, fc);
  record(d, fd);
  const double tol = rel_tol * (1.0 + std::abs(a) + std::abs(b));
  while (b - a > tol) {
    bool go_left;
    if (std::isfinite(fc) || std::isfinite(fd)) {
      go_left = fc < fd || (fc == fd && out.t < c);
    } else if (out.t > c && out.t < d) {
      a = c;
      b = d;
      c = b - kPhi * (b - a);
      d = a + kPhi * (b - a);
      fc = h(c);
      fd = h(d);
      record(c, fc);
      record(d, fd);
      continue;
    } else {
      go_left = out.t <= c;
    }
    if (go_left) {
      b = d;
      d = c;
      fd = fc;
      c = b - kPhi * (b - a);
      fc = h(c);
      record(c, fc);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kPhi * (b - a);
      fd = h(d);
      record(d, fd);
    }
  }
  return out;
}

Min1D minimize_halfline(const std::function<double(double)>& h, const std::function<double(double)>& upper) {
  std::vector<double> ts{0.0};
  std::vector<double> vs{h(0.0)};
  double best = vs[0];
  for (double t = 1e-6; t < 1e12; t *= 2.0) {
    ts.push_back(t);
    vs.push_back(h(t));
    if (std::isfinite(best) && t > upper(best)) break;
    best = std::min(best, vs.back());
  }
  return bracket_and_refine(h, ts, vs, 1e-11);
}

Min1D minimize_interval(const std::function<double(double)>& h, double a, double b, int scan, double rel_tol) {
  std::vector<double> ts, vs;
  for (int i = 0; i <= scan + 1; ++i) {
    const double t = a + (b - a) * static_cast<double>(i) / static_cast<double>(scan + 1);
    ts.push_back(t);
    vs.push_back(h(t));
  }
  return bracket_and_refine(h, ts, vs, rel_tol);
}

Min1D minimize_convex_slope(const std::function<ValueSlope(double)>& h, double lo, double hi) {
  auto value_only = [&](double t) { return h(t).value; };
  const ValueSlope at_lo = h(lo);
  Min1D best{lo, at_lo.value};
  if (hi <= lo) return best;
  auto record = [&](double t, double v) {
    if (v < best.value) best = {t, v};
  };
  // Slope at a point, with +-inf standing in for the side of a domain edge.
  auto slope_of = [](const ValueSlope& vs, double edge_sign) {
    return std::isfinite(vs.value) ? vs.slope : edge_sign * kInfinity;
  };
  double a = lo;
  double sa = slope_of(at_lo, -1.0);
  if (std::isnan(sa)) return minimize_interval(value_only, lo, std::isfinite(hi) ? hi : lo + 1.0);
  if (sa >= 0.0) return best;

  double b, sb;
  if (std::isfinite(hi)) {
    b = hi;
    const ValueSlope vb = h(b);
    record(b, vb.value);
    sb = slope_of(vb, 1.0);
  } else {
    double step = std::max(1.0, std::abs(lo));
    b = lo + step;
    for (int i = 0;; ++i) {
      const ValueSlope vb = h(b);
      record(b, vb.value);
      sb = slope_of(vb, 1.0);
      if (std::isnan(sb) || sb >= 0.0 || i > 200) break;
      a = b;
      sa = sb;
      step *= 2.0;
      b = lo + step;
    }
  }
  if (std::isnan(sb)) return golden_minimize(value_only, a, b, best.t, best.value);
  if (sb <= 0.0) return best;

  int side = 0;
  for (int iter = 0; iter < 200 && b - a > 1e-14 * (1.0 + std::abs(a) + std::abs(b)); ++iter) {
    double t;
    if (std::isfinite(sa) && std::isfinite(sb)) {
      t = a - sa * (b - a) / (sb - sa);
      const double w = b - a;
      if (!(t > a + 1e-3 * w && t < b - 1e-3 * w)) t = 0.5 * (a + b);
    } else {
      t = 0.5 * (a + b);
    }
    const ValueSlope vt = h(t);
    record(t, vt.value);
    const double st = slope_of(vt, 0.0);
    if (std::isnan(st) || !std::isfinite(vt.value)) return golden_minimize(value_only, a, b, best.t, best.value);
    if (st == 0.0) break;
    if (st < 0.0) {
      a = t;
      sa = st;
      if (side == -1 && std::isfinite(sb)) sb *= 0.5;  // Illinois step
      side = -1;
    } else {
      b = t;
      sb = st;
      if (side == 1 && std::isfinite(sa)) sa *= 0.5;
      side = 1;
    }
    if (std::abs(st) <= 1e-13) break;
  }
  return best;
}

}  // namespace ldrate
