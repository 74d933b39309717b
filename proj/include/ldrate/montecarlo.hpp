#pragma once

// Monte Carlo estimates of P(L_n in B) by exponential tilting, and of the
// decay rate from a weighted regression of -log p_n on n.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ldrate/ext_real.hpp"
#include "ldrate/particle_laws.hpp"
#include "ldrate/rate_engine.hpp"
#include "ldrate/types.hpp"

namespace ldrate {

// Worker count from LDRATE_THREADS (default: hardware concurrency, at least 1).
int mc_thread_count();

// One untilted draw of L_n.
Vec sample_Ln(const Scenario& sc, long n, std::uint64_t seed);

// Draws of L_n under the tilt Q with dQ/dP = prod_i exp(<f_i^T lambda, Z_i> - Lambda(f_i^T lambda)).
// Identical weights are grouped and sampled as one tilted sum.
class TiltedSampler {
 public:
  TiltedSampler(const Scenario& sc, long n, const Vec& tilt);

  struct Draw {
    Vec L;
    double log_weight;  // log dP/dQ
  };
  Draw draw(Rng& rng) const;

  long n() const { return n_; }
  const Vec& tilt() const { return tilt_; }

 private:
  std::shared_ptr<const ParticleLaw> law_;
  long n_;
  Vec tilt_;
  std::vector<Mat> mats_;
  std::vector<long> counts_;
  std::vector<Vec> thetas_;
  double log_norm_ = 0.0;  // sum_i Lambda(f_i^T lambda)
};

enum class EventKind { Ball, UpperTail };

struct MCPlan {
  MCPlan(Scenario sc, Vec target) : scenario(std::move(sc)), z(std::move(target)) {}

  Scenario scenario;
  Vec z;
  double delta = 0.05;
  std::vector<long> n_list;
  long trials = 100000;
  std::optional<Vec> tilt;  // nullopt: saddle point of the n-particle sum at z
  std::uint64_t seed = 1;
  EventKind event = EventKind::Ball;  // UpperTail: {L_n >= z}, scalar only
  double tolerance = 0.10;            // relative agreement band
  double abs_tolerance = 0.01;        // absolute band, used when the computed rate is near 0
  std::optional<double> computed_rate;  // nullopt: rate_If at z (dual route)

  void validate() const;
};

struct DecayPoint {
  long n = 0;
  Vec tilt;
  long hits = 0;
  double p_hat = 0.0;          // 0 when censored
  double log_p = 0.0;          // log p_hat
  double log_p_se = 0.0;       // standard error of log p_hat (delta method)
  double decay = 0.0;          // -log(p_hat) / n
  double decay_half_width = 0.0;  // 95% half-width of decay
  bool censored = false;
};

struct DecayEstimate {
  std::vector<DecayPoint> points;
  double slope = 0.0;  // fitted decay rate
  double slope_half_width = 0.0;
  double intercept = 0.0;
  ExtReal computed_rate;
  double relative_error = 0.0;
  bool agrees = false;
  bool inconclusive = false;  // fewer than three usable points
  std::vector<std::string> warnings;
};

// Tilt used at size n: the given one, or the maximizer of
// <lambda, z> - (1/n) sum_i Lambda(f_i^T lambda).
Vec tilt_for(const MCPlan& plan, long n);

DecayPoint estimate_point(const MCPlan& plan, long n);
DecayEstimate estimate_decay(const MCPlan& plan);

// Weighted least squares fit of -log p_n = a + s n over uncensored points.
void fit_decay(DecayEstimate& est);

// Period-2 probes along even and odd n with one-sided events {L_n >= z}.
// Each computed rate is that of the scenario frozen at the class limits.
std::pair<DecayEstimate, DecayEstimate> subsequence_probe(const Scenario& sc, double z,
                                                          const std::vector<long>& n_even,
                                                          const std::vector<long>& n_odd, long trials,
                                                          std::uint64_t seed, double tolerance = 0.20);

}  // namespace ldrate
