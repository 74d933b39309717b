#include "ldrate/particle_laws.hpp"

#include <cmath>
#include <stdexcept>

namespace ldrate {

void ParticleLaw::check_dim(const Vec& v, const char* op) const {
  if (v.size() != dim())
    throw std::invalid_argument(std::string(op) + ": expected dimension " + std::to_string(dim()) + ", got " +
                                std::to_string(v.size()));
}

bool ParticleLaw::in_domain(const Vec& theta) const {
  check_dim(theta, "in_domain");
  return do_in_domain(theta);
}

ExtReal ParticleLaw::log_laplace(const Vec& theta) const {
  check_dim(theta, "log_laplace");
  if (!do_in_domain(theta)) return ExtReal::infinity();
  return do_log_laplace(theta);
}

Vec ParticleLaw::grad_log_laplace(const Vec& theta) const {
  check_dim(theta, "grad_log_laplace");
  if (!do_in_domain(theta)) throw std::invalid_argument("grad_log_laplace: point outside the effective domain");
  return do_grad(theta);
}

Mat ParticleLaw::hess_log_laplace(const Vec& theta) const {
  check_dim(theta, "hess_log_laplace");
  if (!do_in_domain(theta)) throw std::invalid_argument("hess_log_laplace: point outside the effective domain");
  return do_hess(theta);
}

ExtReal ParticleLaw::rate(const Vec& z) const {
  check_dim(z, "rate");
  return do_rate(z);
}

Vec ParticleLaw::draw_tilted(const Vec& theta, Rng& rng) const {
  check_dim(theta, "draw_tilted");
  if (!do_in_domain(theta)) throw std::invalid_argument("draw_tilted: tilt outside the effective domain");
  return do_draw_tilted(theta, rng);
}

Vec ParticleLaw::draw_tilted_sum(long count, const Vec& theta, Rng& rng) const {
  Vec sum = Vec::Zero(dim());
  for (long i = 0; i < count; ++i) sum += draw_tilted(theta, rng);
  return sum;
}

namespace {

HalfspaceDomain gamma_domain(int dim, const std::vector<GammaSumLaw::Component>& comps) {
  std::vector<Halfspace> cons;
  for (const auto& c : comps) cons.push_back({c.direction, 1.0});
  return HalfspaceDomain(dim, std::move(cons));
}

int checked_dim(const std::vector<GammaSumLaw::Component>& comps) {
  if (comps.empty()) throw std::invalid_argument("GammaSumLaw: at least one component required");
  const auto d = comps.front().direction.size();
  for (const auto& c : comps) {
    if (c.direction.size() != d) throw std::invalid_argument("GammaSumLaw: inconsistent component dimensions");
    if (!(c.shape > 0.0)) throw std::invalid_argument("GammaSumLaw: shapes must be positive");
  }
  return static_cast<int>(d);
}

}  // namespace

GammaSumLaw::GammaSumLaw(std::string name, std::vector<Component> components)
    : name_(std::move(name)),
      dim_(checked_dim(components)),
      components_(std::move(components)),
      domain_(gamma_domain(dim_, components_)) {}

bool GammaSumLaw::do_in_domain(const Vec& theta) const { return domain_.contains(theta); }

double GammaSumLaw::do_log_laplace(const Vec& theta) const {
  double s = 0.0;
  for (const auto& c : components_) s -= c.shape * std::log1p(-c.direction.dot(theta));
  return s;
}

Vec GammaSumLaw::do_grad(const Vec& theta) const {
  Vec g = Vec::Zero(dim_);
  for (const auto& c : components_) g += c.direction * (c.shape / (1.0 - c.direction.dot(theta)));
  return g;
}

Mat GammaSumLaw::do_hess(const Vec& theta) const {
  Mat h = Mat::Zero(dim_, dim_);
  for (const auto& c : components_) {
    const double gap = 1.0 - c.direction.dot(theta);
    h += (c.shape / (gap * gap)) * c.direction * c.direction.transpose();
  }
  return h;
}

ExtReal GammaSumLaw::do_rate(const Vec& z) const { return support_function(domain_, z); }

Vec GammaSumLaw::do_draw_tilted(const Vec& theta, Rng& rng) const { return draw_tilted_sum(1, theta, rng); }

Vec GammaSumLaw::draw_tilted_sum(long count, const Vec& theta, Rng& rng) const {
  check_dim(theta, "draw_tilted_sum");
  if (!domain_.contains(theta)) throw std::invalid_argument("draw_tilted_sum: tilt outside the effective domain");
  Vec z = Vec::Zero(dim_);
  for (const auto& c : components_) {
    // Tilting Gamma(k, 1) by t gives Gamma(k, scale 1/(1-t)); sums add shapes.
    std::gamma_distribution<double> gamma(c.shape * static_cast<double>(count), 1.0 / (1.0 - c.direction.dot(theta)));
    z += c.direction * gamma(rng);
  }
  return z;
}

bool GaussCrossLaw::do_in_domain(const Vec& t) const {
  return t(0) < 0.5 && t(1) < 0.5 && (1.0 - 2.0 * t(0)) * (1.0 - 2.0 * t(1)) - t(2) * t(2) > 0.0;
}

double GaussCrossLaw::do_log_laplace(const Vec& t) const {
  return -0.5 * std::log((1.0 - 2.0 * t(0)) * (1.0 - 2.0 * t(1)) - t(2) * t(2));
}

Vec GaussCrossLaw::do_grad(const Vec& t) const {
  const double p = 1.0 - 2.0 * t(0), q = 1.0 - 2.0 * t(1), c = t(2);
  const double det = p * q - c * c;
  Vec g(3);
  g << q / det, p / det, c / det;
  return g;
}

Mat GaussCrossLaw::do_hess(const Vec& t) const {
  const double p = 1.0 - 2.0 * t(0), q = 1.0 - 2.0 * t(1), c = t(2);
  const double det = p * q - c * c;
  const double d2 = det * det;
  Mat h(3, 3);
  h << 2 * q * q, 2 * c * c, 2 * q * c,  //
      2 * c * c, 2 * p * p, 2 * p * c,   //
      2 * q * c, 2 * p * c, p * q + c * c;
  return h / d2;
}

ExtReal GaussCrossLaw::do_rate(const Vec& z) const {
  const double x = z(0), y = z(1), r = z(2);
  if (x < 0.0 || y < 0.0) return ExtReal::infinity();
  const double tol = 1e-12 * (1.0 + std::abs(x * y));
  if (std::abs(r * r - x * y) > tol) return ExtReal::infinity();
  return 0.5 * (x + y);
}

Vec GaussCrossLaw::do_draw_tilted(const Vec& t, Rng& rng) const {
  // Tilted (X,Y) is centred Gaussian with covariance (I - 2 Theta)^{-1},
  // Theta = [[a, c/2], [c/2, b]].
  const double p = 1.0 - 2.0 * t(0), q = 1.0 - 2.0 * t(1), c = t(2);
  const double det = p * q - c * c;
  const double s11 = q / det, s12 = c / det, s22 = p / det;
  const double l11 = std::sqrt(s11);
  const double l21 = s12 / l11;
  const double l22 = std::sqrt(std::max(0.0, s22 - l21 * l21));
  std::normal_distribution<double> normal(0.0, 1.0);
  const double g1 = normal(rng), g2 = normal(rng);
  const double x = l11 * g1;
  const double y = l21 * g1 + l22 * g2;
  Vec z(3);
  z << x * x, y * y, x * y;
  return z;
}

std::shared_ptr<const ParticleLaw> make_law(BuiltInLaw which) {
  switch (which) {
    case BuiltInLaw::ChiSq1:
      return std::make_shared<GammaSumLaw>("ChiSq1",
                                           std::vector<GammaSumLaw::Component>{{Vec::Constant(1, 2.0), 0.5}});
    case BuiltInLaw::ChiSqPair:
      return std::make_shared<GammaSumLaw>("ChiSqPair",
                                           std::vector<GammaSumLaw::Component>{{Vec::Constant(2, 2.0), 0.5}});
    case BuiltInLaw::GaussCross:
      return std::make_shared<GaussCrossLaw>();
  }
  throw std::invalid_argument("make_law: unknown law");
}

std::shared_ptr<const ParticleLaw> make_law(const std::string& name) {
  if (name == "ChiSq1") return make_law(BuiltInLaw::ChiSq1);
  if (name == "ChiSqPair") return make_law(BuiltInLaw::ChiSqPair);
  if (name == "GaussCross") return make_law(BuiltInLaw::GaussCross);
  throw std::invalid_argument("unknown law '" + name + "'");
}

std::vector<Vec> sample(const ParticleLaw& law, std::uint64_t seed, std::size_t count) {
  if (count < 1) throw std::invalid_argument("sample: count must be positive");
  Rng rng(seed);
  std::vector<Vec> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(law.draw(rng));
  return out;
}

std::uint64_t substream_seed(std::uint64_t master, std::uint64_t k) {
  // splitmix64 of (master, k)
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (k + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace ldrate
