#include "ldrate/nonconvex.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ldrate/errors.hpp"
#include "ldrate/lp.hpp"

namespace ldrate {

void NonConvexScenario::validate() const {
  if (!(kappa1 > kappa2 && kappa2 > 1.0))
    throw std::invalid_argument("NonConvexScenario: need kappa1 > kappa2 > 1");
  if (T != 1 && T != 2) throw std::invalid_argument("NonConvexScenario: T must be 1 or 2");
}

std::vector<double> NonConvexScenario::outliers() const {
  if (T == 1) return {kappa1};
  return {kappa1, kappa2};
}

Scenario NonConvexScenario::scenario() const {
  validate();
  std::vector<OutlierTrack> tracks{OutlierTrack{"kappa1", {kappa1}}};
  if (T == 2) tracks.push_back(OutlierTrack{"kappa2", {kappa2}});
  WeightArraySpec spec{DiscreteMeasure::dirac(1.0), tracks, SupportSet::atoms({1.0})};
  return Scenario(make_law(BuiltInLaw::GaussCross), spec, WeightFunction::spiked5x3());
}

Vec probe_point(double kappa2) {
  Vec z(5);
  z << 1.0, 1.0, kappa2, kappa2, 0.0;
  return z;
}

ExtReal bulk_gamma_star(const Vec& z0) {
  if (z0.size() != 5) throw std::invalid_argument("bulk_gamma_star: expected a 5-vector");
  const double x = z0[0], y = z0[1], r = z0[4];
  if (z0[2] != x || z0[3] != y) return ExtReal::infinity();
  const double det = x * y - r * r;
  if (!(x > 0.0 && y > 0.0 && det > 0.0)) return ExtReal::infinity();
  return 0.5 * (x + y) - 1.0 - 0.5 * std::log(det);
}

namespace {

struct SplitState {
  double x0, y0, r0;
};

// Bulk part left over after removing the outlier pieces.
SplitState leftover(const Vec& z, const std::vector<OutlierPiece>& pieces) {
  SplitState s{z[0], z[1], z[4]};
  for (const auto& p : pieces) {
    s.x0 -= p.u;
    s.y0 -= p.v;
    s.r0 -= p.sign * std::sqrt(p.u * p.v);
  }
  return s;
}

double det_of(const SplitState& s) {
  if (!(s.x0 > 0.0 && s.y0 > 0.0)) return -kInf;
  return s.x0 * s.y0 - s.r0 * s.r0;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

}  // namespace

ExtReal split_objective(const NonConvexScenario& sc, const Vec& z, const std::vector<OutlierPiece>& pieces) {
  sc.validate();
  const auto kap = sc.outliers();
  if (pieces.size() != kap.size()) throw std::invalid_argument("split_objective: one piece per outlier");
  double su = 0.0, sv = 0.0;
  for (std::size_t l = 0; l < kap.size(); ++l) {
    if (pieces[l].u < 0.0 || pieces[l].v < 0.0) return ExtReal::infinity();
    su += (kap[l] - 1.0) * pieces[l].u;
    sv += (kap[l] - 1.0) * pieces[l].v;
  }
  const double tol = 1e-12 * (1.0 + z.cwiseAbs().maxCoeff());
  if (std::abs(su - (z[2] - z[0])) > tol || std::abs(sv - (z[3] - z[1])) > tol) return ExtReal::infinity();
  const SplitState s = leftover(z, pieces);
  const double det = det_of(s);
  if (!(det > 0.0)) return ExtReal::infinity();
  return 0.5 * (z[0] + z[1]) - 1.0 - 0.5 * std::log(det);
}

NonConvexRate rate_nonconvex(const NonConvexScenario& sc, const Vec& z) {
  sc.validate();
  if (z.size() != 5) throw std::invalid_argument("rate_nonconvex: expected a 5-vector");
  const auto kap = sc.outliers();
  const double U = z[2] - z[0];
  const double V = z[3] - z[1];
  NonConvexRate out;
  out.value = ExtReal::infinity();
  if (U < 0.0 || V < 0.0) {
    out.reason = "z3 < z1 or z4 < z2: outlier masses would be negative";
    return out;
  }

  // Pieces from (t_u, t_v) in [0,1]^2 and a sign pattern.
  auto make = [&](double tu, double tv, int signs) {
    std::vector<OutlierPiece> p(kap.size());
    if (kap.size() == 1) {
      p[0] = {U / (kap[0] - 1.0), V / (kap[0] - 1.0), (signs & 1) ? -1 : 1};
    } else {
      p[0] = {tu * U / (kap[0] - 1.0), tv * V / (kap[0] - 1.0), (signs & 1) ? -1 : 1};
      p[1] = {(1.0 - tu) * U / (kap[1] - 1.0), (1.0 - tv) * V / (kap[1] - 1.0), (signs & 2) ? -1 : 1};
    }
    return p;
  };
  auto score = [&](double tu, double tv, int signs) { return det_of(leftover(z, make(tu, tv, signs))); };

  const int branches = kap.size() == 1 ? 2 : 4;
  struct Seed {
    double det, tu, tv;
    int signs;
  };
  std::vector<Seed> seeds;
  const int grid = kap.size() == 1 ? 1 : 33;
  for (int s = 0; s < branches; ++s)
    for (int i = 0; i < grid; ++i)
      for (int j = 0; j < grid; ++j) {
        const double tu = grid == 1 ? 1.0 : double(i) / (grid - 1);
        const double tv = grid == 1 ? 1.0 : double(j) / (grid - 1);
        seeds.push_back({score(tu, tv, s), tu, tv, s});
      }
  std::sort(seeds.begin(), seeds.end(), [](const Seed& a, const Seed& b) { return a.det > b.det; });

  Seed best{-kInf, 0, 0, 0};
  constexpr int kStarts = 32;
  const int starts = std::min<int>(kStarts, static_cast<int>(seeds.size()));
  for (int k = 0; k < starts; ++k) {
    Seed cur = seeds[k];
    if (kap.size() == 2) {
      // Compass search on the box, accepting improvements of det.
      double step = 1.0 / 32.0;
      while (step > 1e-13) {
        bool moved = false;
        for (const auto& d : std::array<std::array<double, 2>, 4>{{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}}) {
          const double tu = std::clamp(cur.tu + step * d[0], 0.0, 1.0);
          const double tv = std::clamp(cur.tv + step * d[1], 0.0, 1.0);
          const double v = score(tu, tv, cur.signs);
          if (v > cur.det) {
            cur = {v, tu, tv, cur.signs};
            moved = true;
          }
        }
        if (!moved) step *= 0.5;
      }
    }
    if (cur.det > best.det) best = cur;
  }

  if (!(best.det > 0.0)) {
    out.reason = "no split leaves a bulk part with x0 > 0, y0 > 0 and x0 y0 > r0^2";
    return out;
  }
  out.pieces = make(best.tu, best.tv, best.signs);
  const SplitState s = leftover(z, out.pieces);
  out.z0 = Vec(5);
  out.z0 << s.x0, s.y0, s.x0, s.y0, s.r0;
  out.value = 0.5 * (z[0] + z[1]) - 1.0 - 0.5 * std::log(best.det);
  return out;
}

double witness_residual(double kappa1, double kappa2, const FeasibilityWitness& w, bool literal) {
  const double e[] = {
      w.x0 + w.x1 + w.x2 - 1.0,
      w.y0 + w.y1 + w.y2 - 1.0,
      w.x0 + kappa1 * w.x1 + kappa2 * w.x2 - kappa2,
      w.y0 + kappa1 * w.y1 + kappa2 * w.y2 - kappa2,
      literal ? w.r0 * w.r0 + w.eps1 * w.x1 * w.y1 + w.eps2 * w.x2 * w.y2
              : w.r0 + w.eps1 * std::sqrt(w.x1 * w.y1) + w.eps2 * std::sqrt(w.x2 * w.y2),
  };
  double m = 0.0;
  for (double v : e) m = std::max(m, std::abs(v));
  return m;
}

namespace {

void check_pair(double kappa1, double kappa2) {
  if (!(kappa1 > kappa2 && kappa2 > 1.0)) throw std::invalid_argument("need kappa1 > kappa2 > 1");
}

}  // namespace

FeasibilityResult solve_system_barI(double kappa1, double kappa2) {
  check_pair(kappa1, kappa2);
  FeasibilityResult res;
  // x0 + x1 = 1 and x0 + kappa1 x1 = kappa2 fix x; y is identical.
  const double x0 = (kappa1 - kappa2) / (kappa1 - 1.0);
  const double x1 = (kappa2 - 1.0) / (kappa1 - 1.0);
  // r0 = -r1 with r1^2 = x1 y1, so r0^2 < x0 y0 reads x1 < x0.
  if (!(x1 * x1 < x0 * x0)) {
    res.reason = "forced split x0 = " + fmt(x0) + " leaves x1 y1 >= x0 y0";
    return res;
  }
  FeasibilityWitness w;
  w.x0 = w.y0 = x0;
  w.x1 = w.y1 = x1;
  w.eps1 = 1;
  w.r0 = -x1;
  res.feasible = true;
  res.witness = w;
  return res;
}

FeasibilityResult solve_system_I(double kappa1, double kappa2) {
  check_pair(kappa1, kappa2);
  FeasibilityResult res;
  const double den = kappa1 + kappa2 - 2.0;
  FeasibilityWitness w;
  w.x0 = w.y0 = (kappa1 - kappa2) / den;
  w.x1 = w.y1 = w.x2 = w.y2 = (kappa2 - 1.0) / den;
  w.eps1 = -1;
  w.eps2 = 1;
  w.r0 = 0.0;
  const double tol = 1e-12;
  const double lit = witness_residual(kappa1, kappa2, w, true);
  const double root = witness_residual(kappa1, kappa2, w, false);
  const bool positive = w.x0 > 0 && w.y0 > 0 && w.x1 > 0 && w.y1 > 0 && w.x2 > 0 && w.y2 > 0;
  if (!positive || lit > tol || root > tol || !(w.r0 * w.r0 < w.x0 * w.y0)) {
    res.reason = "witness check failed (residual " + fmt(std::max(lit, root)) + ")";
    return res;
  }
  res.feasible = true;
  res.witness = w;
  return res;
}

RationalPolyhedron spiked_pullback(const RationalPolyhedron& D0, const Rational& kappa) {
  if (D0.dim != 3) throw std::invalid_argument("spiked_pullback: D0 must live in R^3");
  RationalPolyhedron out;
  out.dim = 5;
  out.rhs = D0.rhs;
  for (const auto& a : D0.rows) {
    // <a, f(kappa)^T lambda> = <f(kappa) a, lambda>
    out.rows.push_back({a[0], a[1], kappa * a[0], kappa * a[1], a[2]});
  }
  return out;
}

RationalPolyhedron intersect(const RationalPolyhedron& a, const RationalPolyhedron& b) {
  if (a.dim != b.dim) throw std::invalid_argument("intersect: dimension mismatch");
  RationalPolyhedron out = a;
  out.rows.insert(out.rows.end(), b.rows.begin(), b.rows.end());
  out.rhs.insert(out.rhs.end(), b.rhs.begin(), b.rhs.end());
  return out;
}

std::optional<Rational> sup_exact(const RationalPolyhedron& P, const std::vector<Rational>& c) {
  if (static_cast<int>(c.size()) != P.dim) throw std::invalid_argument("sup_exact: dimension mismatch");
  return lp::polyhedron_sup(P.rows, P.rhs, c);
}

bool contains_exact(const RationalPolyhedron& inner, const RationalPolyhedron& outer) {
  for (std::size_t i = 0; i < outer.rows.size(); ++i) {
    const auto s = sup_exact(inner, outer.rows[i]);
    if (!s || *s > outer.rhs[i]) return false;
  }
  return true;
}

bool convex_counterpart_equal(const RationalPolyhedron& D0, const Rational& kappa1, const Rational& kappa2) {
  if (!(kappa1 >= kappa2 && kappa2 > Rational(1)))
    throw std::invalid_argument("convex_counterpart_equal: need kappa1 >= kappa2 > 1");
  if (kappa1 == kappa2) return true;
  const auto pair = intersect(spiked_pullback(D0, Rational(1)), spiked_pullback(D0, kappa1));
  return contains_exact(pair, spiked_pullback(D0, kappa2));
}

bool convex_counterpart_equal(double kappa1, double kappa2, const ParticleLaw& law) {
  if (!(kappa1 >= kappa2 && kappa2 > 1.0))
    throw std::invalid_argument("convex_counterpart_equal: need kappa1 >= kappa2 > 1");
  const HalfspaceDomain* D0 = law.polyhedral_domain();
  if (D0 == nullptr || law.dim() != 3)
    throw UnsupportedDomainError("convex_counterpart_equal: law " + law.name() + " lacks a polyhedral domain in R^3");
  const WeightFunction f = WeightFunction::spiked5x3();
  const HalfspaceDomain pair = D0->pullback(f(1.0)).intersect(D0->pullback(f(kappa1)));
  return pair.subset_of(D0->pullback(f(kappa2)));
}

}  // namespace ldrate
