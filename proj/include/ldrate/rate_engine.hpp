#pragma once

// Convex-case rate pipeline for L_n = (1/n) sum_i f(x_i^n) Z_i:
//   Gamma(lambda) = sum_atoms w Lambda(f(x)^T lambda),
//   D = intersection of the pulled-back law domains over the outlier limits,
//   I_f = Gamma* [inf-conv] support(.|D) = sup_{lambda in D} <lambda,z> - Gamma(lambda).

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ldrate/convex_kit.hpp"
#include "ldrate/ext_real.hpp"
#include "ldrate/particle_laws.hpp"
#include "ldrate/types.hpp"
#include "ldrate/weight_arrays.hpp"

namespace ldrate {

inline constexpr long kDefaultHorizon = 1L << 40;

struct Scenario {
  std::shared_ptr<const ParticleLaw> law;
  WeightArraySpec spec;
  WeightFunction f;
  long horizon = kDefaultHorizon;

  Scenario(std::shared_ptr<const ParticleLaw> law, WeightArraySpec spec, WeightFunction f,
           long horizon = kDefaultHorizon);

  int m() const { return f.rows(); }
  int d() const { return f.cols(); }
};

// sum_k w_k Lambda(Y_k^T lambda) for weight matrices Y_k (m x d) and weights w_k >= 0.
class AtomicGamma {
 public:
  AtomicGamma(std::shared_ptr<const ParticleLaw> law, std::vector<Mat> mats, std::vector<double> weights);

  int dim() const { return m_; }
  bool in_domain(const Vec& lambda) const;
  ExtReal value(const Vec& lambda) const;
  Vec grad(const Vec& lambda) const;
  Mat hess(const Vec& lambda) const;
  // Requires a law with a polyhedral domain.
  const HalfspaceDomain& domain() const;

  const std::vector<Mat>& mats() const { return mats_; }
  const std::vector<double>& weights() const { return weights_; }
  const ParticleLaw& law() const { return *law_; }

 private:
  std::shared_ptr<const ParticleLaw> law_;
  std::vector<Mat> mats_;
  std::vector<double> weights_;
  int m_;
  std::optional<HalfspaceDomain> domain_;
};

AtomicGamma bulk_gamma(const Scenario& sc);

// Maximizer of <lambda, z> - Gamma(lambda) over cl(D) (nullptr D: whole space).
struct DualSolution {
  ExtReal value;
  std::optional<Vec> lambda;      // attained maximizer
  std::vector<int> active;        // indices of active D constraints
  Vec multipliers;                // KKT multipliers of the active constraints
  bool value_only = false;        // sup finite but no certified maximizer
};

DualSolution maximize_dual(const AtomicGamma& gamma, const HalfspaceDomain* D, const Vec& z,
                           const std::optional<Vec>& warm_start = std::nullopt);

enum class Route { InfConv, DualSup, ClosedForm };
std::string to_string(Route r);

struct RateReport {
  ExtReal value;
  Route route = Route::DualSup;
  std::optional<Vec> lambda_star;
  std::optional<Vec> z_star;
  std::optional<Vec> z_n;
  bool value_only = false;  // no certificate (relative boundary or inf-conv route)
  std::string region;       // set by closed-form reports
};

HalfspaceDomain domain_Dy(const ParticleLaw& law, const Mat& y);

// Intersection of domain_Dy over the outer limit set, reduced. Throws
// A4FailureError with a witness when the inner and outer intersections differ.
HalfspaceDomain outlier_domain(const Scenario& sc);

ExtReal gamma(const Scenario& sc, const Vec& lambda);

struct ConjugateValue {
  ExtReal value;
  std::optional<Vec> lambda_star;
};
ConjugateValue gamma_star(const Scenario& sc, const Vec& z);
ConjugateValue gamma_star(const AtomicGamma& g, const Vec& z, const std::optional<Vec>& warm_start = std::nullopt);

// Rate engine bound to one scenario; caches Gamma and D.
class RateEngine {
 public:
  explicit RateEngine(const Scenario& sc);

  const AtomicGamma& gamma() const { return gamma_; }
  const HalfspaceDomain& domain() const { return domain_; }
  int dim() const { return gamma_.dim(); }

  ConjugateValue gamma_star(const Vec& z) const { return ldrate::gamma_star(gamma_, z); }
  RateReport rate(const Vec& z, Route route) const;
  ExtReal partial_mean_rate(const Vec& z) const { return support_function(domain_, z); }

 private:
  RateReport dual_sup(const Vec& z) const;
  RateReport inf_conv(const Vec& z) const;

  AtomicGamma gamma_;
  HalfspaceDomain domain_;
};

RateReport rate_If(const Scenario& sc, const Vec& z, Route route);
ExtReal partial_mean_rate(const Scenario& sc, const Vec& z);

// ChiSq1, R = delta_1, no outliers, f(x) = x.
Scenario cramer_scenario();
// ChiSq1, R = delta_1, one outlier weight 3, f(x) = x.
Scenario figure1_scenario();
// ChiSq1, R = delta_0, f(x) = x, one track alternating 3 (n even) / 1 (n odd).
Scenario example1_scenario();
// example1 plus a constant track at 4.
Scenario example2_scenario();

}  // namespace ldrate
