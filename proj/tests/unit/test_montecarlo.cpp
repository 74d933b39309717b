#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "ldrate/montecarlo.hpp"
#include "ldrate/nonconvex.hpp"

using namespace ldrate;

TEST_CASE("one particle: L_1 = f(w) Z_1 exactly") {
  WeightArraySpec spec{DiscreteMeasure::dirac(0.0), {OutlierTrack{"w", {2.5}}}, SupportSet::atoms({0.0})};
  const Scenario sc(make_law(BuiltInLaw::ChiSq1), spec, WeightFunction::identity_scalar());
  Rng rng(99);
  const Vec z = sc.law->draw_tilted_sum(1, Vec::Zero(1), rng);
  CHECK(sample_Ln(sc, 1, 99)[0] == 2.5 * z[0]);
}

TEST_CASE("law of large numbers") {
  const Scenario sc = cramer_scenario();
  double s = 0, s2 = 0;
  const int N = 1000;
  for (int i = 0; i < N; ++i) {
    const double v = sample_Ln(sc, 10000, 1000 + i)[0];
    s += v;
    s2 += v * v;
  }
  const double mean = s / N, sd = std::sqrt(s2 / N - mean * mean);
  CHECK(std::abs(mean - 1.0) < 3 * sd / std::sqrt(double(N)));
  CHECK(sd == doctest::Approx(std::sqrt(2.0 / 10000)).epsilon(0.1));
}

TEST_CASE("spiked array: first two components near the bulk mean") {
  const Scenario sc = NonConvexScenario{1.5, 1.4, 2}.scenario();
  const long n = 2000;
  Vec s = Vec::Zero(5);
  const int N = 1000;
  for (int i = 0; i < N; ++i) s += sample_Ln(sc, n, 5000 + i);
  s /= N;
  // E L_n = (1, 1, (n - 2 + 1.5 + 1.4)/n, same, 0); sd of a mean of N draws ~ sqrt(2/n/N)
  const double band = 3 * std::sqrt(2.0 / n / N);
  CHECK(std::abs(s[0] - 1.0) < band);
  CHECK(std::abs(s[1] - 1.0) < band);
  CHECK(std::abs(s[2] - (n + 0.9) / n) < band);
  CHECK(std::abs(s[4]) < band);
}

TEST_CASE("likelihood ratios have mean one") {
  const Scenario sc = figure1_scenario();
  const TiltedSampler ts(sc, 20, Vec::Constant(1, 0.1));
  Rng rng(4);
  const int N = 100000;
  double s = 0, s2 = 0;
  for (int i = 0; i < N; ++i) {
    const double w = std::exp(ts.draw(rng).log_weight);
    s += w;
    s2 += w * w;
  }
  const double m = s / N, se = std::sqrt((s2 / N - m * m) / N);
  CHECK(std::abs(m - 1.0) < 3 * se);
}

TEST_CASE("importance sampling is unbiased at small n") {
  const Scenario sc = figure1_scenario();
  // P(L_5 >= 2) by plain and by tilted sampling
  const long n = 5, N = 200000;
  Rng rng(8);
  const TiltedSampler plain(sc, n, Vec::Zero(1));
  double hits = 0;
  for (long i = 0; i < N; ++i) hits += plain.draw(rng).L[0] >= 2.0;
  const double p0 = hits / N, se0 = std::sqrt(p0 * (1 - p0) / N);
  const TiltedSampler tilted(sc, n, Vec::Constant(1, 0.12));
  double s = 0, s2 = 0;
  for (long i = 0; i < N; ++i) {
    const auto d = tilted.draw(rng);
    const double w = d.L[0] >= 2.0 ? std::exp(d.log_weight) : 0.0;
    s += w;
    s2 += w * w;
  }
  const double p1 = s / N, se1 = std::sqrt((s2 / N - p1 * p1) / N);
  CHECK(std::abs(p0 - p1) < 3 * std::sqrt(se0 * se0 + se1 * se1));
}

TEST_CASE("tilt outside a weight domain is rejected before sampling") {
  MCPlan plan(figure1_scenario(), Vec::Constant(1, 2.0));
  plan.n_list = {50, 100, 200};
  plan.trials = 100;
  plan.tilt = Vec::Constant(1, 0.2);  // 6 * 0.2 > 1
  CHECK_THROWS_AS(estimate_decay(plan), std::invalid_argument);
  plan.tilt.reset();
  plan.n_list = {200, 100};
  CHECK_THROWS_AS(estimate_decay(plan), std::invalid_argument);
}

TEST_CASE("auto tilt is the n-particle saddle point") {
  MCPlan plan(cramer_scenario(), Vec::Constant(1, 2.0));
  plan.n_list = {100};
  CHECK(tilt_for(plan, 100)[0] == doctest::Approx(0.25));
}

TEST_CASE("decay estimates are deterministic and thread independent") {
  MCPlan plan(figure1_scenario(), Vec::Constant(1, 1.8));
  plan.n_list = {50, 100, 200};
  plan.trials = 10000;
  plan.seed = 123;
  setenv("LDRATE_THREADS", "1", 1);
  const auto a = estimate_decay(plan);
  setenv("LDRATE_THREADS", "3", 1);
  const auto b = estimate_decay(plan);
  unsetenv("LDRATE_THREADS");
  REQUIRE(a.points.size() == b.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    CHECK(a.points[i].log_p == b.points[i].log_p);
    CHECK(a.points[i].log_p_se == b.points[i].log_p_se);
  }
  CHECK(a.slope == b.slope);
}

TEST_CASE("mean target decays at rate zero") {
  MCPlan plan(cramer_scenario(), Vec::Constant(1, 1.0));
  plan.n_list = {100, 200, 400, 800};
  plan.trials = 20000;
  const auto est = estimate_decay(plan);
  CHECK(est.agrees);
  CHECK(std::abs(est.slope) < 0.01);
  for (std::size_t i = 1; i < est.points.size(); ++i) CHECK(est.points[i].p_hat >= est.points[i - 1].p_hat);
}

TEST_CASE("censored points make the estimate inconclusive") {
  MCPlan plan(cramer_scenario(), Vec::Constant(1, 2.0));
  plan.n_list = {100, 200, 400};
  plan.trials = 50;
  plan.tilt = Vec::Constant(1, -2.0);  // pushes mass away from the target
  plan.delta = 0.01;
  const auto est = estimate_decay(plan);
  CHECK(est.inconclusive);
  CHECK_FALSE(est.agrees);
  CHECK_FALSE(est.warnings.empty());
}

TEST_CASE("subsequence probe on the alternating example") {
  const auto [even, odd] = subsequence_probe(example1_scenario(), 1.0, {40, 80, 160}, {41, 81, 161}, 20000, 5);
  CHECK(even.computed_rate.value() == doctest::Approx(1.0 / 6.0));
  CHECK(odd.computed_rate.value() == doctest::Approx(0.5));
  CHECK(even.slope == doctest::Approx(1.0 / 6.0).epsilon(0.2));
  CHECK(odd.slope == doctest::Approx(0.5).epsilon(0.2));
  CHECK_THROWS(subsequence_probe(example1_scenario(), 1.0, {41}, {41}, 10, 1));
}
