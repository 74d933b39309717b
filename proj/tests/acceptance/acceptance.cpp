// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ldrate/convex_kit.hpp"
#include "ldrate/errors.hpp"
#include "ldrate/gauss2d.hpp"
#include "ldrate/lp.hpp"
#include "ldrate/montecarlo.hpp"
#include "ldrate/nonconvex.hpp"
#include "ldrate/rate_engine.hpp"
#include "ldrate/weight_arrays.hpp"

using namespace ldrate;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream note;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (pass) note << "failed: ";
      else note << "; ";
      note << what;
      pass = false;
    }
  }
};

int failures = 0;

void criterion(int id, const std::string& title, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.pass = false;
    o.note << " exception: " << e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.pass) ++failures;
  std::printf("[%s] %2d %s | %s | %.2fs\n", o.pass ? "PASS" : "FAIL", id, title.c_str(), o.note.str().c_str(), secs);
  std::fflush(stdout);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Scenario frozen(const Scenario& sc, long parity) {
  WeightArraySpec spec = sc.spec;
  for (auto& t : spec.tracks) t = OutlierTrack{t.name, {t.limit(parity)}};
  return Scenario(sc.law, spec, sc.f, sc.horizon);
}

double fig1_piecewise(double z) {
  if (z <= 1.5) return 0.5 * (z - 1 - std::log(z));
  return 0.5 * (0.5 - std::log(1.5)) + (z - 1.5) / 6.0;
}

using Q = Rational;

}  // namespace

int main() {
  std::printf("acceptance suite\n");

  criterion(1, "example rates and A4 verdicts", [](Outcome& o) {
    const auto t0 = std::chrono::steady_clock::now();
    const RateEngine even(frozen(example1_scenario(), 0)), odd(frozen(example1_scenario(), 1));
    const RateEngine ex2(example2_scenario());
    double err = 0.0;
    for (double z : {0.5, 1.0, 2.0}) {
      const Vec zv = Vec::Constant(1, z);
      err = std::max(err, std::abs(even.partial_mean_rate(zv).value() - z / 6));
      err = std::max(err, std::abs(odd.partial_mean_rate(zv).value() - z / 2));
      err = std::max(err, std::abs(ex2.partial_mean_rate(zv).value() - z / 8));
    }
    o.require(err <= 1e-12, "partial mean rates off by " + std::to_string(err));
    const auto s1 = example1_scenario(), s2 = example2_scenario();
    const bool a1 = check_a4(limit_sets(s1.spec, s1.f, s1.horizon), *s1.law).holds;
    const bool a2 = check_a4(limit_sets(s2.spec, s2.f, s2.horizon), *s2.law).holds;
    o.require(!a1, "A4 holds for example 1");
    o.require(a2, "A4 fails for example 2");
    const double t = seconds_since(t0);
    o.require(t < 1.0, "runtime " + std::to_string(t));
    o.note << "max |error| " << err << ", A4(ex1)=" << a1 << ", A4(ex2)=" << a2;
  });

  criterion(2, "figure-1 kink", [](Outcome& o) {
    const auto t0 = std::chrono::steady_clock::now();
    const Scenario sc = figure1_scenario();
    double err = 0.0;
    for (int i = 0; i <= 380; ++i) {
      const double z = 0.2 + 0.01 * i;
      const double v = rate_If(sc, Vec::Constant(1, z), Route::DualSup).value.value();
      err = std::max(err, std::abs(v - fig1_piecewise(z)));
    }
    o.require(err <= 1e-5, "max error " + std::to_string(err));
    const double t = seconds_since(t0);
    o.require(t < 5.0, "runtime " + std::to_string(t));
    o.note << "381 grid points, max |error| " << err;
  });

  criterion(3, "two-dimensional gaussian example", [](Outcome& o) {
    const auto t0 = std::chrono::steady_clock::now();
    const Gauss2D g(Gauss2DParams::standard());
    const auto& p = g.params();
    o.require(p.H_max() == 4.0 / 15.0 && p.H_min() == -4.0 / 15.0, "H values");
    o.require(p.alpha_max() == 0.25 && p.alpha_min() == -0.25, "alpha values");
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> X(0.01, 3.0), S(-3.99, 3.99);
    double err = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const double x = X(rng), y = S(rng) * x;
      Vec z(2);
      z << x, y;
      const ExtReal a = g.rate_closed_form(x, y).value;
      const ExtReal b = g.engine().rate(z, Route::DualSup).value;
      if (a.is_inf() || b.is_inf()) {
        o.require(false, "infinite value inside the domain");
        break;
      }
      err = std::max(err, std::abs(a.value() - b.value()));
    }
    o.require(err <= 1e-5, "closed vs dual " + std::to_string(err));
    const double spot = g.rate_closed_form(1.0, -2.0).value.value();
    const double spot_err = std::abs(spot - 0.25 * std::log(15.0 / 4.0));
    o.require(spot_err <= 1e-6, "I_f(1,-2)");
    const double zero = g.rate_closed_form(1.0, 0.0).value.value();
    o.require(zero <= 1e-8, "I_f(1,0)");
    const double t = seconds_since(t0);
    o.require(t < 60.0, "runtime " + std::to_string(t));
    o.note << "H_max=" << p.H_max() << " alpha_max=" << p.alpha_max() << ", closed vs dual " << err
           << ", |I_f(1,-2) - log(15/4)/4| " << spot_err << ", I_f(1,0)=" << zero;
  });

  criterion(4, "route equivalence and certificates", [](Outcome& o) {
    struct Case {
      std::string name;
      Scenario sc;
      std::function<Vec(std::mt19937&)> draw;
    };
    std::vector<Case> cases;
    cases.push_back({"figure1", figure1_scenario(), [](std::mt19937& r) {
                       return Vec(Vec::Constant(1, std::uniform_real_distribution<double>(0.05, 6.0)(r)));
                     }});
    cases.push_back({"gauss2d", Gauss2DParams::standard().scenario(), [](std::mt19937& r) {
                       const double x = std::uniform_real_distribution<double>(0.05, 3.0)(r);
                       const double s = std::uniform_real_distribution<double>(-3.95, 3.95)(r);
                       Vec z(2);
                       z << x, s * x;
                       return z;
                     }});
    for (auto& c : cases) {
      const RateEngine e(c.sc);
      std::mt19937 rng(77);
      double route_err = 0.0, split_err = 0.0, value_err = 0.0;
      int cone_fail = 0, uncertified = 0;
      for (int i = 0; i < 1000; ++i) {
        const Vec z = c.draw(rng);
        const RateReport d = e.rate(z, Route::DualSup);
        const RateReport v = e.rate(z, Route::InfConv);
        route_err = std::max(route_err, std::abs(d.value.to_double() - v.value.to_double()));
        if (!d.lambda_star || !d.z_star || !d.z_n) {
          ++uncertified;
          continue;
        }
        split_err = std::max(split_err, (*d.z_star + *d.z_n - z).norm());
        if (!in_cone(normal_cone(e.domain(), *d.lambda_star, 1e-7), *d.z_n, 1e-8)) ++cone_fail;
        const double recomposed = e.gamma_star(*d.z_star).value.to_double() + d.lambda_star->dot(*d.z_n);
        value_err = std::max(value_err, std::abs(recomposed - d.value.value()));
      }
      o.require(route_err <= 1e-5, c.name + " route gap " + std::to_string(route_err));
      o.require(uncertified == 0, c.name + " reports without certificate: " + std::to_string(uncertified));
      o.require(split_err <= 1e-12, c.name + " z*+z_n != z");
      o.require(cone_fail == 0, c.name + " normal cone failures " + std::to_string(cone_fail));
      o.require(value_err <= 1e-6, c.name + " value recomposition " + std::to_string(value_err));
      o.note << c.name << ": route gap " << route_err << ", split " << split_err << ", recomposition " << value_err
             << "; ";
    }
  });

  criterion(5, "ray linearity", [](Outcome& o) {
    const Gauss2D g(Gauss2DParams::standard());
    double worst = 0.0;
    for (double x0 : {0.5, 1.0, 2.0})
      for (int side : {-1, 1}) worst = std::max(worst, g.ray_linearity_check(x0, side, {0.5, 1.0, 2.0, 4.0}).max_error);
    o.require(worst <= 1e-6, "max error " + std::to_string(worst));
    o.note << "6 rays x 4 steps, max |increment - t/2| " << worst;
  });

  criterion(6, "non-convex second-eigenvalue effect", [](Outcome& o) {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937 rng(606);
    std::uniform_real_distribution<double> K2(1.05, 3.0), U(0.02, 0.98);
    int bad_I = 0, bad_barI = 0, bad_T2 = 0, bad_T1 = 0;
    double worst_res = 0.0;
    for (int i = 0; i < 100; ++i) {
      const double k2 = K2(rng);
      const double k1 = k2 + U(rng) * (k2 - 1.0);  // k2 < k1 < 2 k2 - 1
      const auto I = solve_system_I(k1, k2);
      if (!I.feasible || !I.witness) {
        ++bad_I;
      } else {
        const auto& w = *I.witness;
        const double den = k1 + k2 - 2;
        const double res = std::max({witness_residual(k1, k2, w, true), witness_residual(k1, k2, w, false),
                                     std::abs(w.x0 - (k1 - k2) / den), std::abs(w.x1 - (k2 - 1) / den),
                                     std::abs(w.x2 - (k2 - 1) / den)});
        worst_res = std::max(worst_res, res);
        if (res > 1e-12 || w.eps1 != -1 || w.eps2 != 1 || w.r0 != 0.0) ++bad_I;
      }
      if (solve_system_barI(k1, k2).feasible) ++bad_barI;
      const Vec z = probe_point(k2);
      if (!rate_nonconvex(NonConvexScenario{k1, k2, 2}, z).value.is_finite()) ++bad_T2;
      if (!rate_nonconvex(NonConvexScenario{k1, k2, 1}, z).value.is_inf()) ++bad_T1;
    }
    o.require(bad_I == 0, "system I failures " + std::to_string(bad_I));
    o.require(bad_barI == 0, "system barI feasible " + std::to_string(bad_barI));
    o.require(bad_T2 == 0, "T=2 infinite " + std::to_string(bad_T2));
    o.require(bad_T1 == 0, "T=1 finite " + std::to_string(bad_T1));
    const auto spot = solve_system_I(1.5, 1.4);
    o.require(spot.witness && std::abs(spot.witness->x0 - 1.0 / 9) <= 1e-12 &&
                  std::abs(spot.witness->x1 - 4.0 / 9) <= 1e-12,
              "spot witness");
    const double t = seconds_since(t0);
    o.require(t < 10.0, "runtime " + std::to_string(t));
    o.note << "100 pairs, worst witness residual " << worst_res << ", spot x0=" << spot.witness->x0
           << " x1=" << spot.witness->x1;
  });

  criterion(7, "convex second-eigenvalue neutrality", [](Outcome& o) {
    std::mt19937 rng(707);
    std::uniform_int_distribution<int> A(-5, 5), B(1, 6), K(1, 40);
    int contain_fail = 0, value_fail = 0, unbounded = 0;
    for (int inst = 0; inst < 20; ++inst) {
      RationalPolyhedron d0{3, {}, {}};
      for (int r = 0; r < 6; ++r) {
        d0.rows.push_back({Q(A(rng)), Q(A(rng)), Q(A(rng))});
        d0.rhs.push_back(Q(B(rng)));
      }
      if (inst % 2 == 0) {
        for (int k = 0; k < 3; ++k)
          for (int sgn : {-1, 1}) {
            std::vector<Q> row(3, Q(0));
            row[static_cast<std::size_t>(k)] = Q(sgn);
            d0.rows.push_back(row);
            d0.rhs.push_back(Q(4));
          }
      }
      // 1 < k2 < k1 as rationals
      const Q k2 = Q(1) + Q(K(rng), 20);
      const Q k1 = k2 + Q(K(rng), 20);
      if (!convex_counterpart_equal(d0, k1, k2)) ++contain_fail;
      const auto pair = intersect(spiked_pullback(d0, Q(1)), spiked_pullback(d0, k1));
      const auto triple = intersect(pair, spiked_pullback(d0, k2));
      for (int j = 0; j < 20; ++j) {
        std::vector<Q> c;
        for (int k = 0; k < 5; ++k) c.push_back(Q(A(rng)));
        const auto s2 = sup_exact(pair, c), s3 = sup_exact(triple, c);
        if (!s2) ++unbounded;
        if (s2.has_value() != s3.has_value() || (s2 && *s2 != *s3)) ++value_fail;
      }
    }
    o.require(contain_fail == 0, "containment failures " + std::to_string(contain_fail));
    o.require(value_fail == 0, "value mismatches " + std::to_string(value_fail));
    o.note << "20 instances x 20 objectives, exact rational LP; " << unbounded << " objectives unbounded on both sets";
  });

  criterion(8, "monte carlo decay", [](Outcome& o) {
    const auto t0 = std::chrono::steady_clock::now();
    MCPlan cramer(cramer_scenario(), Vec::Constant(1, 2.0));
    cramer.n_list = {200, 500, 1000, 2000};
    cramer.trials = 100000;
    cramer.seed = 8001;
    cramer.tolerance = 0.10;
    cramer.computed_rate = 0.5 * (1.0 - std::log(2.0));
    const auto a = estimate_decay(cramer);
    o.require(a.agrees, "cramer estimate " + std::to_string(a.slope));
    const double ta = seconds_since(t0);
    o.require(ta < 120.0, "cramer runtime " + std::to_string(ta));

    MCPlan fig1(figure1_scenario(), Vec::Constant(1, 2.0));
    fig1.n_list = {200, 500, 1000, 2000};
    fig1.trials = 100000;
    fig1.seed = 8002;
    fig1.tolerance = 0.15;
    fig1.computed_rate = fig1_piecewise(2.0);
    const auto b = estimate_decay(fig1);
    o.require(b.agrees, "figure-1 estimate " + std::to_string(b.slope));

    const auto [even, odd] = subsequence_probe(example1_scenario(), 1.0, {40, 80, 160, 320}, {41, 81, 161, 321},
                                               100000, 8003, 0.20);
    o.require(even.agrees && std::abs(even.slope - 1.0 / 6) <= 0.2 / 6, "even " + std::to_string(even.slope));
    o.require(odd.agrees && std::abs(odd.slope - 0.5) <= 0.1, "odd " + std::to_string(odd.slope));
    o.note << "cramer " << a.slope << " vs 0.15343 (rel " << a.relative_error << "), figure-1 " << b.slope
           << " vs " << fig1_piecewise(2.0) << " (rel " << b.relative_error << "), even " << even.slope << ", odd "
           << odd.slope;
  });

  criterion(9, "convex-kit properties", [](Outcome& o) {
    std::mt19937 rng(909);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    // Biconjugation on random convex grid functions (10 in 1-D, 10 in 2-D).
    double worst_ratio = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
      const bool two = rep >= 10;
      const double a = 0.2 + std::abs(U(rng)), b = std::abs(U(rng)), c = U(rng), d = U(rng), e = std::abs(U(rng));
      const double c2 = U(rng);
      auto fn = [&](const Vec& x) {
        double v = a * x.squaredNorm() + b * std::abs(x[0] - c) + d * x[0] + e * std::max(0.0, x[0] - 0.3);
        if (two) v += b * std::abs(x[1] - c2) + 0.5 * a * x[0] * x[1];
        return ExtReal(v);
      };
      const GridBox in = two ? GridBox{{-1.5, -1.5}, {1.5, 1.5}, {41, 41}} : GridBox{{-2.0}, {2.0}, {401}};
      const auto f = GridFunction::sample(in, fn);
      const auto star = legendre_conjugate(f);
      const auto back = legendre_conjugate(star, in);
      const double tol = 2.0 * conjugation_tolerance(in, star.box());
      double err = 0.0;
      for (std::size_t i = 0; i < f.size(); ++i)
        err = std::max(err, std::abs(back.value(i).value() - f.value(i).value()));
      worst_ratio = std::max(worst_ratio, err / tol);
    }
    o.require(worst_ratio <= 1.0, "biconjugate error / tolerance " + std::to_string(worst_ratio));

    // Conjugate of the chi-square log-Laplace transform.
    const GridBox lam{{-20.0}, {0.4999}, {200001}};
    const auto L = GridFunction::sample(lam, [](const Vec& t) { return ExtReal(-0.5 * std::log(1 - 2 * t[0])); });
    const auto Ls = legendre_conjugate(L, GridBox{{0.2}, {4.0}, {39}});
    double lerr = 0.0;
    for (std::size_t i = 0; i < Ls.size(); ++i) {
      const double z = Ls.node(i)[0];
      lerr = std::max(lerr, std::abs(Ls.value(i).value() - 0.5 * (z - 1 - std::log(z))));
    }
    o.require(lerr <= 1e-3, "legendre error " + std::to_string(lerr));

    // Support function from open and closed descriptions, exact arithmetic.
    std::uniform_int_distribution<int> A(-6, 6), B(0, 5);
    int mismatch = 0, finite = 0;
    for (int rep = 0; rep < 50; ++rep) {
      const int dim = 2 + rep % 2;
      std::vector<std::vector<Q>> rows;
      std::vector<Q> rhs;
      for (int r = 0; r < 6; ++r) {
        std::vector<Q> row;
        for (int k = 0; k < dim; ++k) row.push_back(Q(A(rng)));
        rows.push_back(row);
        rhs.push_back(Q(B(rng) + 1));
      }
      std::vector<Q> z;
      for (int k = 0; k < dim; ++k) z.push_back(Q(A(rng)));
      const auto closed = lp::polyhedron_sup(rows, rhs, z);
      const auto open = lp::polyhedron_sup_open(rows, rhs, z, Q(1, 1000000));
      if (closed.has_value() != open.has_value() || (closed && *closed != *open)) ++mismatch;
      if (closed) ++finite;
    }
    o.require(mismatch == 0, "open/closed mismatches " + std::to_string(mismatch));
    o.note << "biconjugate worst error/tolerance " << worst_ratio << ", legendre max error " << lerr
           << ", 50 polyhedra (" << finite << " bounded directions) open==closed";
  });

  criterion(10, "bulk/outlier decomposition", [](Outcome& o) {
    const WeightArraySpec spec = NonConvexScenario{1.5, 1.4, 2}.scenario().spec;
    long threshold = -1;
    bool card_ok = true, frac_ok = true;
    for (long n = 2; n <= 5000; ++n) {
      const auto d = decompose(spec, n);
      const bool two = d.outliers.size() == 2;
      if (two && threshold < 0) threshold = n;
      if (threshold > 0 && !two) card_ok = false;
      if (n >= 200 && static_cast<double>(d.bulk.size()) / static_cast<double>(n) < 0.99) frac_ok = false;
    }
    o.require(threshold > 0 && card_ok, "card(C_n) != 2 after the threshold");
    o.require(frac_ok, "card(B_n)/n < 0.99");
    std::vector<double> dist;
    for (long m = 2; m <= 20; ++m) dist.push_back(decompose(spec, cubic_schedule(m)).max_bulk_distance);
    bool mono = true;
    for (std::size_t i = 1; i < dist.size(); ++i) mono = mono && dist[i] <= dist[i - 1];
    o.require(mono && dist.back() <= 1e-12, "bulk distance not decreasing to 0");
    o.note << "threshold n=" << threshold << ", card(C_n)=2 for n in [" << threshold
           << ", 5000], bulk fraction >= 0.99 for n >= 200, max bulk distance at n=m^3 (m=20): " << dist.back();
  });

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
