#include "ldrate/rate_engine.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "ldrate/errors.hpp"
#include "ldrate/lp.hpp"
#include "ldrate/optimize1d.hpp"

namespace ldrate {

Scenario::Scenario(std::shared_ptr<const ParticleLaw> l, WeightArraySpec s, WeightFunction fn, long h)
    : law(std::move(l)), spec(std::move(s)), f(std::move(fn)), horizon(h) {
  if (!law) throw std::invalid_argument("Scenario: law required");
  spec.validate();
  if (f.cols() != law->dim())
    throw std::invalid_argument("Scenario: weight function has " + std::to_string(f.cols()) +
                                " columns but the law has dimension " + std::to_string(law->dim()));
}

AtomicGamma::AtomicGamma(std::shared_ptr<const ParticleLaw> law, std::vector<Mat> mats, std::vector<double> weights)
    : law_(std::move(law)), mats_(std::move(mats)), weights_(std::move(weights)) {
  if (!law_ || mats_.empty() || mats_.size() != weights_.size())
    throw std::invalid_argument("AtomicGamma: need a law and matching nonempty atom lists");
  m_ = static_cast<int>(mats_.front().rows());
  for (const auto& y : mats_)
    if (y.rows() != m_ || y.cols() != law_->dim()) throw std::invalid_argument("AtomicGamma: inconsistent matrix shapes");
  if (const auto* dz = law_->polyhedral_domain()) {
    HalfspaceDomain acc = HalfspaceDomain::whole_space(m_);
    for (std::size_t k = 0; k < mats_.size(); ++k)
      if (weights_[k] > 0.0) acc = acc.intersect(dz->pullback(mats_[k]));
    domain_ = std::move(acc);
  }
}

bool AtomicGamma::in_domain(const Vec& lambda) const {
  for (std::size_t k = 0; k < mats_.size(); ++k)
    if (weights_[k] > 0.0 && !law_->in_domain(mats_[k].transpose() * lambda)) return false;
  return true;
}

ExtReal AtomicGamma::value(const Vec& lambda) const {
  if (lambda.size() != m_) throw std::invalid_argument("Gamma: dimension mismatch");
  double s = 0.0;
  for (std::size_t k = 0; k < mats_.size(); ++k) {
    if (weights_[k] == 0.0) continue;
    const ExtReal v = law_->log_laplace(mats_[k].transpose() * lambda);
    if (v.is_inf()) return ExtReal::infinity();
    s += weights_[k] * v.value();
  }
  return s;
}

Vec AtomicGamma::grad(const Vec& lambda) const {
  Vec g = Vec::Zero(m_);
  for (std::size_t k = 0; k < mats_.size(); ++k)
    if (weights_[k] > 0.0) g += weights_[k] * (mats_[k] * law_->grad_log_laplace(mats_[k].transpose() * lambda));
  return g;
}

Mat AtomicGamma::hess(const Vec& lambda) const {
  Mat h = Mat::Zero(m_, m_);
  for (std::size_t k = 0; k < mats_.size(); ++k)
    if (weights_[k] > 0.0)
      h += weights_[k] * (mats_[k] * law_->hess_log_laplace(mats_[k].transpose() * lambda) * mats_[k].transpose());
  return h;
}

const HalfspaceDomain& AtomicGamma::domain() const {
  if (!domain_) throw UnsupportedDomainError("Gamma: law '" + law_->name() + "' has no polyhedral domain");
  return *domain_;
}

AtomicGamma bulk_gamma(const Scenario& sc) {
  std::vector<Mat> mats;
  for (double x : sc.spec.bulk.points()) mats.push_back(sc.f(x));
  return AtomicGamma(sc.law, std::move(mats), sc.spec.bulk.weights());
}

namespace {

std::vector<double> to_std(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Vec to_vec(const std::vector<double>& v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = v[i];
  return out;
}

// Concave objective restricted to an open convex set.
struct Concave {
  std::function<bool(const Vec&)> inside;
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> grad;
  std::function<Mat(const Vec&)> hess;
};

enum class NewtonStatus { Converged, Diverged, Stalled };

struct NewtonResult {
  NewtonStatus status = NewtonStatus::Stalled;
  Vec x;
  double value = 0.0;
};

// Damped Newton ascent on x0 + span(N). Convergence is declared on the
// Newton decrement, which stays large along escaping directions.
NewtonResult newton_max(const Concave& obj, Vec x, const Mat& N, double gscale) {
  NewtonResult res;
  double fx = obj.value(x);
  const double gtol = 1e-9 * gscale;
  for (int iter = 0; iter < 200; ++iter) {
    const Vec g = N.transpose() * obj.grad(x);
    if (N.cols() == 0) {
      res = {NewtonStatus::Converged, x, fx};
      return res;
    }
    Mat H = -(N.transpose() * obj.hess(x) * N);  // negative Hessian, PSD
    const double reg = 1e-13 * (1.0 + H.diagonal().cwiseAbs().maxCoeff());
    H.diagonal().array() += reg;
    const Vec p = H.ldlt().solve(g);
    const double decrement = g.dot(p);
    if (!std::isfinite(decrement)) break;
    if (decrement <= 1e-22 * (1.0 + std::abs(fx)) && g.cwiseAbs().maxCoeff() <= gtol) {
      res = {NewtonStatus::Converged, x, fx};
      return res;
    }
    const Vec dir = N * p;
    double alpha = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 80; ++ls, alpha *= 0.5) {
      const Vec cand = x + alpha * dir;
      if (!obj.inside(cand)) continue;
      const double fc = obj.value(cand);
      if (fc >= fx + 1e-4 * alpha * decrement || (fc >= fx && alpha * decrement < 1e-14 * (1.0 + std::abs(fx)))) {
        x = cand;
        fx = fc;
        moved = true;
        break;
      }
    }
    if (x.cwiseAbs().maxCoeff() > 1e10 || fx > 1e15) {
      res = {NewtonStatus::Diverged, x, fx};
      return res;
    }
    if (!moved) break;
  }
  // Line search exhausted: accept only a genuinely flat point.
  const Vec g = N.transpose() * obj.grad(x);
  Mat H = -(N.transpose() * obj.hess(x) * N);
  H.diagonal().array() += 1e-13 * (1.0 + H.diagonal().cwiseAbs().maxCoeff());
  const double decrement = g.dot(H.ldlt().solve(g));
  const bool flat = decrement <= 1e-16 * (1.0 + std::abs(fx)) && g.cwiseAbs().maxCoeff() <= 1e-7 * gscale;
  res = {flat ? NewtonStatus::Converged : NewtonStatus::Stalled, x, fx};
  return res;
}

Concave dual_objective(const AtomicGamma& gamma, const Vec& z) {
  Concave obj;
  obj.inside = [&gamma](const Vec& l) { return gamma.in_domain(l); };
  obj.value = [&gamma, z](const Vec& l) { return z.dot(l) - gamma.value(l).value(); };
  obj.grad = [&gamma, z](const Vec& l) { return Vec(z - gamma.grad(l)); };
  obj.hess = [&gamma](const Vec& l) { return Mat(-gamma.hess(l)); };
  return obj;
}

struct Rows {
  Mat A;
  Vec b;
};

Rows rows_of(const std::vector<Halfspace>& cons, int m) {
  Rows r{Mat(static_cast<Eigen::Index>(cons.size()), m), Vec(static_cast<Eigen::Index>(cons.size()))};
  for (std::size_t j = 0; j < cons.size(); ++j) {
    r.A.row(static_cast<Eigen::Index>(j)) = cons[j].normal.transpose();
    r.b(static_cast<Eigen::Index>(j)) = cons[j].bound;
  }
  return r;
}

// True when sup_{cl D} <lambda,z> - Gamma(lambda) = +inf: either a recession
// direction gains linearly, or one with <z,d> = 0 sends Gamma to -inf.
bool dual_diverges(const Rows& dom, const Rows& D, const Vec& z) {
  const int m = static_cast<int>(z.size());
  auto base = [&]() {
    lp::Problem<double> p(static_cast<std::size_t>(m));
    auto add_rows = [&](const Mat& A) {
      for (Eigen::Index j = 0; j < A.rows(); ++j) p.add_le(to_std(A.row(j).transpose()), 0.0);
    };
    add_rows(dom.A);
    add_rows(D.A);
    for (int i = 0; i < m; ++i) {
      std::vector<double> e(static_cast<std::size_t>(m), 0.0);
      e[static_cast<std::size_t>(i)] = 1.0;
      p.add_le(e, 1.0);
      e[static_cast<std::size_t>(i)] = -1.0;
      p.add_le(e, 1.0);
    }
    return p;
  };
  const double tol = 1e-11 * (1.0 + z.cwiseAbs().maxCoeff());
  auto p1 = base();
  p1.objective = to_std(z);
  const auto r1 = lp::maximize(p1);
  if (r1.status == lp::Status::Optimal && r1.value > tol) return true;
  if (dom.A.rows() == 0) return false;
  auto p2 = base();
  p2.add_le(to_std(-z), 0.0);
  p2.objective = to_std(-dom.A.colwise().sum().transpose());
  const auto r2 = lp::maximize(p2);
  return r2.status == lp::Status::Optimal && r2.value > 1e-11;
}

// Point of {A_S x = b_S} strictly inside the domain rows, if any.
std::optional<Vec> face_interior(const Rows& dom, const Rows& D, const std::vector<int>& S, int m) {
  lp::Problem<double> p(static_cast<std::size_t>(m) + 1);
  p.objective.back() = 1.0;
  for (Eigen::Index j = 0; j < dom.A.rows(); ++j) {
    auto row = to_std(dom.A.row(j).transpose());
    row.push_back(dom.A.row(j).norm());
    p.add_le(row, dom.b(j));
  }
  for (int j : S) {
    auto row = to_std(D.A.row(j).transpose());
    row.push_back(0.0);
    p.add_eq(row, D.b(j));
  }
  std::vector<double> cap(static_cast<std::size_t>(m) + 1, 0.0);
  cap.back() = 1.0;
  p.add_le(cap, 1.0);
  const auto r = lp::maximize(p);
  if (r.status != lp::Status::Optimal || r.value <= 1e-12) return std::nullopt;
  auto x = r.x;
  x.pop_back();
  return to_vec(x);
}

Mat null_basis(const Mat& AS, int m) {
  if (AS.rows() == 0) return Mat::Identity(m, m);
  Eigen::JacobiSVD<Mat> svd(AS, Eigen::ComputeFullV);
  const Eigen::Index rank = svd.rank();
  return svd.matrixV().rightCols(m - rank);
}

void for_each_subset(int k, int max_size, const std::function<bool(const std::vector<int>&)>& fn) {
  std::vector<int> S;
  for (int size = 0; size <= std::min(k, max_size); ++size) {
    std::function<bool(int)> rec = [&](int start) {
      if (static_cast<int>(S.size()) == size) return fn(S);
      for (int j = start; j < k; ++j) {
        S.push_back(j);
        if (rec(j + 1)) return true;
        S.pop_back();
      }
      return false;
    };
    if (rec(0)) return;
  }
}

}  // namespace

DualSolution maximize_dual(const AtomicGamma& gamma, const HalfspaceDomain* D, const Vec& z,
                           const std::optional<Vec>& warm_start) {
  const int m = gamma.dim();
  if (z.size() != m) throw std::invalid_argument("maximize_dual: dimension mismatch");
  const Rows dom = rows_of(gamma.domain().constraints(), m);
  const Rows cons = D ? rows_of(D->constraints(), m) : Rows{Mat(0, m), Vec(0)};
  if (D && D->dim() != m) throw std::invalid_argument("maximize_dual: domain dimension mismatch");

  DualSolution out;
  if (dual_diverges(dom, cons, z)) {
    out.value = ExtReal::infinity();
    return out;
  }

  const Concave obj = dual_objective(gamma, z);
  const double gscale = 1.0 + z.cwiseAbs().maxCoeff();
  const int k = static_cast<int>(cons.A.rows());
  bool found = false;
  for_each_subset(k, m, [&](const std::vector<int>& S) {
    Mat AS(static_cast<Eigen::Index>(S.size()), m);
    Vec bS(static_cast<Eigen::Index>(S.size()));
    for (std::size_t i = 0; i < S.size(); ++i) {
      AS.row(static_cast<Eigen::Index>(i)) = cons.A.row(S[i]);
      bS(static_cast<Eigen::Index>(i)) = cons.b(S[i]);
    }
    if (!S.empty()) {
      Eigen::JacobiSVD<Mat> svd(AS);
      if (svd.rank() < static_cast<Eigen::Index>(S.size())) return false;
    }
    std::optional<Vec> start;
    if (warm_start && gamma.in_domain(*warm_start) &&
        (S.empty() || (AS * *warm_start - bS).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + bS.cwiseAbs().maxCoeff())))
      start = *warm_start;
    if (!start) start = face_interior(dom, cons, S, m);
    if (!start) return false;
    const Mat N = null_basis(AS, m);
    const auto nr = newton_max(obj, *start, N, gscale);
    if (nr.status != NewtonStatus::Converged) return false;
    const Vec& lam = nr.x;
    const double ptol = 1e-9 * (1.0 + (k > 0 ? cons.b.cwiseAbs().maxCoeff() : 0.0) + lam.cwiseAbs().maxCoeff());
    if (k > 0 && (cons.A * lam - cons.b).maxCoeff() > ptol) return false;
    Vec mu = Vec::Zero(static_cast<Eigen::Index>(S.size()));
    const Vec r = z - gamma.grad(lam);
    if (!S.empty()) {
      mu = AS.transpose().colPivHouseholderQr().solve(r);
      if ((AS.transpose() * mu - r).cwiseAbs().maxCoeff() > 1e-7 * gscale) return false;
      if (mu.minCoeff() < -1e-9 * gscale) return false;
    } else if (r.cwiseAbs().maxCoeff() > 1e-7 * gscale) {
      return false;
    }
    out.value = nr.value;
    out.lambda = lam;
    out.active = S;
    out.multipliers = mu.cwiseMax(0.0);
    found = true;
    return true;
  });
  if (found) return out;

  // Finite sup with no certified maximizer: follow the log-barrier path.
  Vec x = D ? D->intersect(gamma.domain()).interior_point() : gamma.domain().interior_point();
  double val = obj.value(x);
  for (double mu = 1.0; mu >= 1e-12; mu *= 0.1) {
    Concave bar;
    bar.inside = [&](const Vec& l) { return obj.inside(l) && (k == 0 || (cons.A * l - cons.b).maxCoeff() < 0.0); };
    bar.value = [&, mu](const Vec& l) { return obj.value(l) + mu * (cons.b - cons.A * l).array().log().sum(); };
    bar.grad = [&, mu](const Vec& l) {
      const Vec s = (cons.b - cons.A * l).cwiseInverse();
      return Vec(obj.grad(l) - mu * cons.A.transpose() * s);
    };
    bar.hess = [&, mu](const Vec& l) {
      const Vec s = (cons.b - cons.A * l).cwiseInverse();
      return Mat(obj.hess(l) - mu * cons.A.transpose() * s.cwiseAbs2().asDiagonal() * cons.A);
    };
    const auto nr = newton_max(bar, x, Mat::Identity(m, m), gscale);
    x = nr.x;
    val = std::max(val, obj.value(x));
  }
  out.value = val;
  out.value_only = true;
  return out;
}

std::string to_string(Route r) {
  switch (r) {
    case Route::InfConv:
      return "inf_conv";
    case Route::DualSup:
      return "dual_sup";
    case Route::ClosedForm:
      return "closed_form";
  }
  return "unknown";
}

HalfspaceDomain domain_Dy(const ParticleLaw& law, const Mat& y) {
  const auto* dz = law.polyhedral_domain();
  if (dz == nullptr) throw UnsupportedDomainError("domain_Dy: law '" + law.name() + "' has no polyhedral domain");
  return dz->pullback(y);
}

HalfspaceDomain outlier_domain(const Scenario& sc) {
  const auto ls = limit_sets(sc.spec, sc.f, sc.horizon);
  const auto chk = check_a4(ls, *sc.law);
  if (!chk.holds)
    throw A4FailureError("inner and outer limit domains differ; no LDP is guaranteed", chk.witness.value_or(Vec()));
  return chk.outer_domain->reduced();
}

ExtReal gamma(const Scenario& sc, const Vec& lambda) { return bulk_gamma(sc).value(lambda); }

ConjugateValue gamma_star(const AtomicGamma& g, const Vec& z, const std::optional<Vec>& warm_start) {
  if (z.size() != g.dim()) throw std::invalid_argument("gamma_star: dimension mismatch");
  const int m = g.dim();
  const Concave obj = dual_objective(g, z);
  const double gscale = 1.0 + z.cwiseAbs().maxCoeff();
  Vec start = (warm_start && g.in_domain(*warm_start)) ? *warm_start : g.domain().interior_point();
  const auto nr = newton_max(obj, start, Mat::Identity(m, m), gscale);
  if (nr.status == NewtonStatus::Converged) return {nr.value, nr.x};
  const DualSolution sol = maximize_dual(g, nullptr, z);
  return {sol.value, sol.lambda};
}

ConjugateValue gamma_star(const Scenario& sc, const Vec& z) { return gamma_star(bulk_gamma(sc), z); }

RateEngine::RateEngine(const Scenario& sc) : gamma_(bulk_gamma(sc)), domain_(outlier_domain(sc)) {
  gamma_.domain();
}

RateReport RateEngine::rate(const Vec& z, Route route) const {
  if (z.size() != dim()) throw std::invalid_argument("rate_If: z has dimension " + std::to_string(z.size()) +
                                                     ", expected " + std::to_string(dim()));
  switch (route) {
    case Route::DualSup:
      return dual_sup(z);
    case Route::InfConv:
      return inf_conv(z);
    case Route::ClosedForm:
      break;
  }
  throw std::invalid_argument("rate_If: closed-form route is only available for the two-atom Gaussian example");
}

RateReport RateEngine::dual_sup(const Vec& z) const {
  RateReport rep;
  rep.route = Route::DualSup;
  const DualSolution sol = maximize_dual(gamma_, &domain_, z);
  rep.value = sol.value;
  if (sol.value.is_inf()) return rep;
  if (sol.value_only || !sol.lambda) {
    rep.value_only = true;
    return rep;
  }
  const Vec& lam = *sol.lambda;
  const double scale = 1.0 + z.cwiseAbs().maxCoeff();
  // z_n assembled from the KKT multipliers so that it lies in the barrier
  // cone exactly; z* then matches grad Gamma(lambda*) to solver accuracy.
  Vec zn = Vec::Zero(z.size());
  for (std::size_t i = 0; i < sol.active.size(); ++i)
    zn += sol.multipliers(static_cast<Eigen::Index>(i)) * domain_.constraints()[static_cast<std::size_t>(sol.active[i])].normal;
  const Vec zs = z - zn;
  if ((zs - gamma_.grad(lam)).cwiseAbs().maxCoeff() > 1e-7 * scale)
    throw ConsistencyError("dual certificate: z* differs from grad Gamma(lambda*)");

  const ConeCert cone = normal_cone(domain_, lam, 1e-7 * (1.0 + lam.cwiseAbs().maxCoeff()));
  if (!in_cone(cone, zn, 1e-6))
    throw ConsistencyError("dual certificate: z - grad Gamma(lambda*) is not in the normal cone of D");
  const ConjugateValue gs = ldrate::gamma_star(gamma_, zs);
  if (gs.value.is_inf()) throw ConsistencyError("dual certificate: Gamma*(z*) is infinite");
  const double pairing = lam.dot(zn);
  if (std::abs(gs.value.value() + pairing - sol.value.value()) > 1e-6 * scale)
    throw ConsistencyError("dual certificate: Gamma*(z*) + <lambda*, z_n> differs from the dual value");
  const ExtReal sigma = support_function(domain_, zn);
  if (sigma.is_inf() || std::abs(sigma.value() - pairing) > 1e-6 * scale)
    throw ConsistencyError("dual certificate: support function of D at z_n differs from <lambda*, z_n>");
  rep.lambda_star = lam;
  rep.z_star = zs;
  rep.z_n = zn;
  return rep;
}

namespace {

// Range of t_j over {t >= 0 : w - sum_i t_i g_i in cone(rows of C)}; the
// cone is the closure of dom Gamma*. nullopt when empty.
std::optional<std::pair<double, double>> generator_range(const Vec& w, const std::vector<Vec>& gens, int j,
                                                         const Rows& C) {
  const int m = static_cast<int>(w.size());
  const int q = static_cast<int>(gens.size());
  const int r = static_cast<int>(C.A.rows());
  lp::Problem<double> p(static_cast<std::size_t>(q + r));
  for (int i = 0; i < m; ++i) {
    std::vector<double> row(static_cast<std::size_t>(q + r), 0.0);
    for (int g = 0; g < q; ++g) row[static_cast<std::size_t>(g)] = gens[static_cast<std::size_t>(g)](i);
    for (int c = 0; c < r; ++c) row[static_cast<std::size_t>(q + c)] = C.A(c, i);
    p.add_eq(row, w(i));
  }
  for (int v = 0; v < q + r; ++v) {
    std::vector<double> row(static_cast<std::size_t>(q + r), 0.0);
    row[static_cast<std::size_t>(v)] = -1.0;
    p.add_le(row, 0.0);
  }
  p.objective.assign(static_cast<std::size_t>(q + r), 0.0);
  p.objective[static_cast<std::size_t>(j)] = -1.0;
  const auto lo = lp::maximize(p);
  if (lo.status == lp::Status::Infeasible) return std::nullopt;
  p.objective[static_cast<std::size_t>(j)] = 1.0;
  const auto hi = lp::maximize(p);
  const double lo_v = std::max(0.0, -lo.value);
  const double hi_v = hi.status == lp::Status::Unbounded ? kInf : std::max(lo_v, hi.value);
  return std::make_pair(lo_v, hi_v);
}

}  // namespace

RateReport RateEngine::inf_conv(const Vec& z) const {
  // I_f(z) = inf_{t >= 0} Gamma*(z - A^T t) + b^T t; by LP duality b^T t may
  // replace the support function of D at A^T t. d/dt_j = b_j - <lambda*, a_j>.
  RateReport rep;
  rep.route = Route::InfConv;
  rep.value_only = true;
  const auto& cons = domain_.constraints();
  const int k = static_cast<int>(cons.size());
  if (k > 2) throw UnsupportedDomainError("inf_conv route supports at most two outlier constraints");
  const Rows C = rows_of(gamma_.domain().constraints(), dim());
  std::optional<Vec> warm;
  auto gstar = [&](const Vec& w) {
    const ConjugateValue cv = ldrate::gamma_star(gamma_, w, warm);
    if (cv.value.is_finite() && cv.lambda_star) warm = cv.lambda_star;
    return cv;
  };
  if (k == 0) {
    rep.value = gstar(z).value;
    return rep;
  }
  std::vector<Vec> gens;
  for (const auto& c : cons) gens.push_back(c.normal);
  const Vec& a0 = gens[0];
  const double b0 = cons[0].bound;

  // Innermost: min over the last generator with the earlier ones fixed.
  std::optional<Vec> inner_lambda;
  auto solve_last = [&](const Vec& base) -> Min1D {
    const Vec& a = gens.back();
    const double b = cons.back().bound;
    const auto range = generator_range(base, {a}, 0, C);
    if (!range) return {0.0, kInf};
    std::optional<Vec> lam_at_best;
    double best_val = kInf;
    const Min1D r = minimize_convex_slope(
        [&](double t) -> ValueSlope {
          const ConjugateValue cv = gstar(base - t * a);
          if (cv.value.is_inf()) return {kInf, 0.0};
          const double v = cv.value.value() + b * t;
          const double s = cv.lambda_star ? b - cv.lambda_star->dot(a) : std::nan("");
          if (v < best_val) {
            best_val = v;
            lam_at_best = cv.lambda_star;
          }
          return {v, s};
        },
        range->first, range->second);
    inner_lambda = lam_at_best;
    return r;
  };

  if (k == 1) {
    rep.value = ExtReal(solve_last(z).value);
    return rep;
  }
  const auto range0 = generator_range(z, gens, 0, C);
  if (!range0) {
    rep.value = ExtReal::infinity();
    return rep;
  }
  const Min1D r = minimize_convex_slope(
      [&](double t0) -> ValueSlope {
        const Min1D in = solve_last(z - t0 * a0);
        if (!std::isfinite(in.value)) return {kInf, 0.0};
        const double s = inner_lambda ? b0 - inner_lambda->dot(a0) : std::nan("");
        return {in.value + b0 * t0, s};
      },
      range0->first, range0->second);
  rep.value = ExtReal(r.value);
  return rep;
}

RateReport rate_If(const Scenario& sc, const Vec& z, Route route) { return RateEngine(sc).rate(z, route); }

ExtReal partial_mean_rate(const Scenario& sc, const Vec& z) { return support_function(outlier_domain(sc), z); }

Scenario cramer_scenario() {
  WeightArraySpec spec{DiscreteMeasure::dirac(1.0), {}, SupportSet::atoms({1.0})};
  return Scenario(make_law(BuiltInLaw::ChiSq1), spec, WeightFunction::identity_scalar());
}

Scenario figure1_scenario() {
  WeightArraySpec spec{DiscreteMeasure::dirac(1.0), {OutlierTrack{"outlier", {3.0}}}, SupportSet::atoms({1.0})};
  return Scenario(make_law(BuiltInLaw::ChiSq1), spec, WeightFunction::identity_scalar());
}

Scenario example1_scenario() {
  WeightArraySpec spec{DiscreteMeasure::dirac(0.0), {OutlierTrack{"alternating", {3.0, 1.0}}}, SupportSet::atoms({0.0})};
  return Scenario(make_law(BuiltInLaw::ChiSq1), spec, WeightFunction::identity_scalar());
}

Scenario example2_scenario() {
  WeightArraySpec spec{DiscreteMeasure::dirac(0.0),
                       {OutlierTrack{"alternating", {3.0, 1.0}}, OutlierTrack{"constant", {4.0}}},
                       SupportSet::atoms({0.0})};
  return Scenario(make_law(BuiltInLaw::ChiSq1), spec, WeightFunction::identity_scalar());
}

}  // namespace ldrate
