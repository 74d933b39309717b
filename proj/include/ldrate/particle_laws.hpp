#pragma once

// Laws of the innovation Z_1: log-Laplace transform, effective domain,
// single-particle rate function and (tilted) samplers.

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "ldrate/convex_kit.hpp"
#include "ldrate/ext_real.hpp"
#include "ldrate/types.hpp"

namespace ldrate {

using Rng = std::mt19937_64;

class ParticleLaw {
 public:
  virtual ~ParticleLaw() = default;

  virtual std::string name() const = 0;
  virtual int dim() const = 0;
  // Whether the single-particle rate is convex (then it equals the support
  // function of the effective domain).
  virtual bool is_convex() const = 0;
  // The effective domain when it is a finite intersection of halfspaces,
  // nullptr otherwise.
  virtual const HalfspaceDomain* polyhedral_domain() const = 0;

  bool in_domain(const Vec& theta) const;
  ExtReal log_laplace(const Vec& theta) const;
  // Derivatives of the log-Laplace transform; theta must lie in the domain.
  Vec grad_log_laplace(const Vec& theta) const;
  Mat hess_log_laplace(const Vec& theta) const;
  // Rate function of Z_1 / n.
  ExtReal rate(const Vec& z) const;

  Vec draw(Rng& rng) const { return draw_tilted(Vec::Zero(dim()), rng); }
  // Draw from the exponentially tilted law dQ/dP = exp(<theta,Z> - Lambda(theta)).
  Vec draw_tilted(const Vec& theta, Rng& rng) const;
  // Sum of `count` independent tilted draws. Laws that are closed under
  // convolution override this with a single draw.
  virtual Vec draw_tilted_sum(long count, const Vec& theta, Rng& rng) const;

 protected:
  virtual bool do_in_domain(const Vec& theta) const = 0;
  virtual double do_log_laplace(const Vec& theta) const = 0;
  virtual Vec do_grad(const Vec& theta) const = 0;
  virtual Mat do_hess(const Vec& theta) const = 0;
  virtual ExtReal do_rate(const Vec& z) const = 0;
  virtual Vec do_draw_tilted(const Vec& theta, Rng& rng) const = 0;

  void check_dim(const Vec& v, const char* op) const;
};

// Z = sum_j v_j G_j with independent G_j ~ Gamma(shape_j, 1).
// Lambda(theta) = -sum_j shape_j log(1 - <v_j, theta>) on {<v_j,theta> < 1}.
// Chi-square laws are the special case v = 2 e, shape = 1/2.
class GammaSumLaw final : public ParticleLaw {
 public:
  struct Component {
    Vec direction;
    double shape = 1.0;
  };

  GammaSumLaw(std::string name, std::vector<Component> components);

  std::string name() const override { return name_; }
  int dim() const override { return dim_; }
  bool is_convex() const override { return true; }
  const HalfspaceDomain* polyhedral_domain() const override { return &domain_; }
  const std::vector<Component>& components() const { return components_; }

  Vec draw_tilted_sum(long count, const Vec& theta, Rng& rng) const override;

 protected:
  bool do_in_domain(const Vec& theta) const override;
  double do_log_laplace(const Vec& theta) const override;
  Vec do_grad(const Vec& theta) const override;
  Mat do_hess(const Vec& theta) const override;
  ExtReal do_rate(const Vec& z) const override;
  Vec do_draw_tilted(const Vec& theta, Rng& rng) const override;

 private:
  std::string name_;
  int dim_;
  std::vector<Component> components_;
  HalfspaceDomain domain_;
};

// Z = (X^2, Y^2, XY) for independent standard normals X, Y. The rate of Z/n
// is (x+y)/2 on the cone {r = ±sqrt(xy), x, y >= 0} and +inf elsewhere.
class GaussCrossLaw final : public ParticleLaw {
 public:
  std::string name() const override { return "GaussCross"; }
  int dim() const override { return 3; }
  bool is_convex() const override { return false; }
  const HalfspaceDomain* polyhedral_domain() const override { return nullptr; }

 protected:
  bool do_in_domain(const Vec& theta) const override;
  double do_log_laplace(const Vec& theta) const override;
  Vec do_grad(const Vec& theta) const override;
  Mat do_hess(const Vec& theta) const override;
  ExtReal do_rate(const Vec& z) const override;
  Vec do_draw_tilted(const Vec& theta, Rng& rng) const override;
};

enum class BuiltInLaw { ChiSq1, ChiSqPair, GaussCross };

std::shared_ptr<const ParticleLaw> make_law(BuiltInLaw which);
// Accepts "ChiSq1", "ChiSqPair", "GaussCross".
std::shared_ptr<const ParticleLaw> make_law(const std::string& name);

// `count` draws from a generator seeded with `seed`.
std::vector<Vec> sample(const ParticleLaw& law, std::uint64_t seed, std::size_t count);

// Seed for the k-th independent substream derived from a master seed.
std::uint64_t substream_seed(std::uint64_t master, std::uint64_t k);

}  // namespace ldrate
