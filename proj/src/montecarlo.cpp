#include "ldrate/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace ldrate {

int mc_thread_count() {
  if (const char* env = std::getenv("LDRATE_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

TiltedSampler::TiltedSampler(const Scenario& sc, long n, const Vec& tilt) : law_(sc.law), n_(n), tilt_(tilt) {
  if (n < 1) throw std::invalid_argument("TiltedSampler: n must be at least 1");
  if (tilt.size() != sc.m()) throw std::invalid_argument("TiltedSampler: tilt has the wrong dimension");
  std::map<double, long> groups;
  for (double x : points(sc.spec, n)) ++groups[x];
  for (const auto& [x, c] : groups) {
    Mat y = sc.f(x);
    Vec theta = y.transpose() * tilt;
    if (!law_->in_domain(theta)) {
      std::ostringstream os;
      os << "tilt outside the effective domain at weight x = " << x;
      throw std::invalid_argument(os.str());
    }
    log_norm_ += static_cast<double>(c) * law_->log_laplace(theta).value();
    mats_.push_back(std::move(y));
    counts_.push_back(c);
    thetas_.push_back(std::move(theta));
  }
}

TiltedSampler::Draw TiltedSampler::draw(Rng& rng) const {
  Vec sum = Vec::Zero(tilt_.size());
  for (std::size_t k = 0; k < mats_.size(); ++k) sum += mats_[k] * law_->draw_tilted_sum(counts_[k], thetas_[k], rng);
  return {sum / static_cast<double>(n_), -tilt_.dot(sum) + log_norm_};
}

Vec sample_Ln(const Scenario& sc, long n, std::uint64_t seed) {
  Rng rng(seed);
  return TiltedSampler(sc, n, Vec::Zero(sc.m())).draw(rng).L;
}

void MCPlan::validate() const {
  if (!(delta > 0.0)) throw std::invalid_argument("MCPlan: delta must be positive");
  if (z.size() != scenario.m()) throw std::invalid_argument("MCPlan: target has the wrong dimension");
  if (n_list.empty()) throw std::invalid_argument("MCPlan: n_list is empty");
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    if (n_list[i] < 1) throw std::invalid_argument("MCPlan: n values must be positive");
    if (i > 0 && n_list[i] <= n_list[i - 1]) throw std::invalid_argument("MCPlan: n_list must be increasing");
  }
  if (trials < 1) throw std::invalid_argument("MCPlan: trials must be positive");
  if (event == EventKind::UpperTail && z.size() != 1)
    throw std::invalid_argument("MCPlan: one-sided events need a scalar target");
  if (tilt && tilt->size() != z.size()) throw std::invalid_argument("MCPlan: tilt has the wrong dimension");
}

Vec tilt_for(const MCPlan& plan, long n) {
  if (plan.tilt) return *plan.tilt;
  std::map<double, long> groups;
  for (double x : points(plan.scenario.spec, n)) ++groups[x];
  std::vector<Mat> mats;
  std::vector<double> w;
  for (const auto& [x, c] : groups) {
    mats.push_back(plan.scenario.f(x));
    w.push_back(static_cast<double>(c) / static_cast<double>(n));
  }
  const ConjugateValue cv = gamma_star(AtomicGamma(plan.scenario.law, mats, w), plan.z);
  if (cv.value.is_inf() || !cv.lambda_star)
    throw std::invalid_argument("MCPlan: no saddle-point tilt at the target for n = " + std::to_string(n));
  return *cv.lambda_star;
}

namespace {

constexpr long kChunk = 2048;

struct ChunkAcc {
  long hits = 0;
  double max_lw = -kInf;
  double s1 = 0.0;  // sum exp(lw - max_lw) over hits
  double s2 = 0.0;  // sum exp(2 (lw - max_lw)) over hits

  void add(double lw) {
    ++hits;
    if (lw > max_lw) {
      const double r = std::exp(max_lw - lw);
      s1 = s1 * r + 1.0;
      s2 = s2 * r * r + 1.0;
      max_lw = lw;
    } else {
      const double e = std::exp(lw - max_lw);
      s1 += e;
      s2 += e * e;
    }
  }
  void merge(const ChunkAcc& o) {
    if (o.hits == 0) return;
    if (hits == 0) {
      *this = o;
      return;
    }
    const double m = std::max(max_lw, o.max_lw);
    const double a = std::exp(max_lw - m), b = std::exp(o.max_lw - m);
    s1 = s1 * a + o.s1 * b;
    s2 = s2 * a * a + o.s2 * b * b;
    max_lw = m;
    hits += o.hits;
  }
};

bool hit(const MCPlan& plan, const Vec& L) {
  if (plan.event == EventKind::UpperTail) return L[0] >= plan.z[0];
  return (L - plan.z).norm() <= plan.delta;
}

}  // namespace

DecayPoint estimate_point(const MCPlan& plan, long n) {
  plan.validate();
  DecayPoint pt;
  pt.n = n;
  pt.tilt = tilt_for(plan, n);
  const TiltedSampler sampler(plan.scenario, n, pt.tilt);

  const long chunks = (plan.trials + kChunk - 1) / kChunk;
  std::vector<ChunkAcc> acc(static_cast<std::size_t>(chunks));
  const std::uint64_t base = substream_seed(plan.seed, static_cast<std::uint64_t>(n));
  std::atomic<long> next{0};
  auto work = [&] {
    for (long c = next++; c < chunks; c = next++) {
      Rng rng(substream_seed(base, static_cast<std::uint64_t>(c)));
      const long count = std::min(kChunk, plan.trials - c * kChunk);
      ChunkAcc& a = acc[static_cast<std::size_t>(c)];
      for (long t = 0; t < count; ++t) {
        const auto d = sampler.draw(rng);
        if (hit(plan, d.L)) a.add(d.log_weight);
      }
    }
  };
  const int workers = static_cast<int>(std::min<long>(mc_thread_count(), chunks));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  ChunkAcc total;
  for (const auto& a : acc) total.merge(a);

  pt.hits = total.hits;
  if (total.hits == 0) {
    pt.censored = true;
    return pt;
  }
  const double N = static_cast<double>(plan.trials);
  pt.log_p = total.max_lw + std::log(total.s1) - std::log(N);
  pt.p_hat = std::exp(pt.log_p);
  const double rel_var = std::max(0.0, (N * total.s2 / (total.s1 * total.s1) - 1.0) / N);
  pt.log_p_se = std::sqrt(rel_var);
  pt.decay = -pt.log_p / static_cast<double>(n);
  pt.decay_half_width = 1.96 * pt.log_p_se / static_cast<double>(n);
  return pt;
}

void fit_decay(DecayEstimate& est) {
  std::vector<const DecayPoint*> use;
  for (const auto& p : est.points) {
    if (p.censored) {
      est.warnings.push_back("n = " + std::to_string(p.n) + ": no hits, point censored");
      continue;
    }
    use.push_back(&p);
  }
  if (use.size() < 3) {
    est.inconclusive = true;
    est.warnings.push_back("fewer than three uncensored points; no regression");
    return;
  }
  double sw = 0, sx = 0, sy = 0;
  for (const auto* p : use) {
    const double se = std::max(p->log_p_se, 1e-3);
    const double w = 1.0 / (se * se);
    sw += w;
    sx += w * static_cast<double>(p->n);
    sy += w * -p->log_p;
  }
  const double xb = sx / sw, yb = sy / sw;
  double sxx = 0, sxy = 0;
  for (const auto* p : use) {
    const double se = std::max(p->log_p_se, 1e-3);
    const double w = 1.0 / (se * se);
    const double dx = static_cast<double>(p->n) - xb;
    sxx += w * dx * dx;
    sxy += w * dx * (-p->log_p - yb);
  }
  est.slope = sxy / sxx;
  est.intercept = yb - est.slope * xb;
  est.slope_half_width = 1.96 / std::sqrt(sxx);
}

namespace {

void compare(DecayEstimate& est, double tol, double abs_tol) {
  if (est.inconclusive) return;
  if (est.computed_rate.is_inf()) {
    est.warnings.push_back("computed rate is infinite");
    return;
  }
  const double c = est.computed_rate.value();
  const double diff = std::abs(est.slope - c);
  est.relative_error = std::abs(c) > abs_tol ? diff / std::abs(c) : diff;
  est.agrees = diff <= std::max(tol * std::abs(c), abs_tol);
}

}  // namespace

DecayEstimate estimate_decay(const MCPlan& plan) {
  plan.validate();
  DecayEstimate est;
  est.computed_rate = plan.computed_rate ? ExtReal(*plan.computed_rate)
                                         : rate_If(plan.scenario, plan.z, Route::DualSup).value;
  // Every tilt is checked against every weight before any sampling.
  for (long n : plan.n_list) TiltedSampler(plan.scenario, n, tilt_for(plan, n));
  for (long n : plan.n_list) est.points.push_back(estimate_point(plan, n));
  fit_decay(est);
  compare(est, plan.tolerance, plan.abs_tolerance);
  return est;
}

std::pair<DecayEstimate, DecayEstimate> subsequence_probe(const Scenario& sc, double z,
                                                          const std::vector<long>& n_even,
                                                          const std::vector<long>& n_odd, long trials,
                                                          std::uint64_t seed, double tolerance) {
  if (sc.m() != 1) throw std::invalid_argument("subsequence_probe: scalar scenarios only");
  for (const auto& t : sc.spec.tracks)
    if (2 % t.period() != 0) throw std::invalid_argument("subsequence_probe: track " + t.name + " is not 2-periodic");
  auto run = [&](const std::vector<long>& ns, long parity) {
    for (long n : ns)
      if (n % 2 != parity) throw std::invalid_argument("subsequence_probe: n = " + std::to_string(n) + " has the wrong parity");
    WeightArraySpec frozen = sc.spec;
    for (auto& t : frozen.tracks) t = OutlierTrack{t.name, {t.limit(parity)}};
    const Scenario sub(sc.law, frozen, sc.f, sc.horizon);
    Vec zv = Vec::Constant(1, z);
    MCPlan plan(sc, zv);
    plan.n_list = ns;
    plan.trials = trials;
    plan.seed = substream_seed(seed, static_cast<std::uint64_t>(parity));
    plan.event = EventKind::UpperTail;
    plan.tolerance = tolerance;
    plan.computed_rate = rate_If(sub, zv, Route::DualSup).value.to_double();
    DecayEstimate est;
    if (std::isinf(*plan.computed_rate)) est.computed_rate = ExtReal::infinity();
    else est.computed_rate = *plan.computed_rate;
    for (long n : ns) est.points.push_back(estimate_point(plan, n));
    fit_decay(est);
    compare(est, plan.tolerance, plan.abs_tolerance);
    return est;
  };
  return {run(n_even, 0), run(n_odd, 1)};
}

}  // namespace ldrate
