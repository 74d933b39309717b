#include "ldrate/convex_kit.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "ldrate/errors.hpp"
#include "ldrate/lp.hpp"

namespace ldrate {

namespace {

std::vector<double> to_std(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Vec to_vec(const std::vector<double>& v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = v[i];
  return out;
}

lp::Problem<double> closed_problem(const std::vector<Halfspace>& cons, int dim, const Vec& objective) {
  lp::Problem<double> prob(static_cast<std::size_t>(dim));
  prob.objective = to_std(objective);
  for (const auto& h : cons) prob.add_le(to_std(h.normal), h.bound);
  return prob;
}

}  // namespace

HalfspaceDomain::HalfspaceDomain(int dim, std::vector<Halfspace> constraints)
    : dim_(dim), constraints_(std::move(constraints)), interior_(Vec::Zero(dim)) {
  if (dim <= 0) throw std::invalid_argument("HalfspaceDomain: dimension must be positive");
  for (const auto& h : constraints_) {
    if (h.normal.size() != dim) throw std::invalid_argument("HalfspaceDomain: normal dimension mismatch");
    if (h.normal.norm() == 0.0) throw std::invalid_argument("HalfspaceDomain: zero normal");
  }
  if (constraints_.empty()) return;

  // Maximize the uniform slack s in <a_j,x> + |a_j| s <= b_j, capped at 1.
  lp::Problem<double> prob(static_cast<std::size_t>(dim) + 1);
  prob.objective.back() = 1.0;
  for (const auto& h : constraints_) {
    auto row = to_std(h.normal);
    row.push_back(h.normal.norm());
    prob.add_le(row, h.bound);
  }
  std::vector<double> cap(static_cast<std::size_t>(dim) + 1, 0.0);
  cap.back() = 1.0;
  prob.add_le(cap, 1.0);
  const auto res = lp::maximize(prob);
  if (res.status != lp::Status::Optimal || res.value <= 1e-12)
    throw std::invalid_argument("HalfspaceDomain: empty interior");
  for (int i = 0; i < dim; ++i) interior_(i) = res.x[static_cast<std::size_t>(i)];
}

bool HalfspaceDomain::contains(const Vec& x) const {
  if (x.size() != dim_) throw std::invalid_argument("HalfspaceDomain::contains: dimension mismatch");
  return std::all_of(constraints_.begin(), constraints_.end(),
                     [&](const Halfspace& h) { return h.normal.dot(x) < h.bound; });
}

bool HalfspaceDomain::in_closure(const Vec& x, double tol) const { return max_violation(x) <= tol; }

double HalfspaceDomain::max_violation(const Vec& x) const {
  if (x.size() != dim_) throw std::invalid_argument("HalfspaceDomain: dimension mismatch");
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& h : constraints_) worst = std::max(worst, h.normal.dot(x) - h.bound);
  return worst;
}

HalfspaceDomain HalfspaceDomain::intersect(const HalfspaceDomain& other) const {
  if (other.dim_ != dim_) throw std::invalid_argument("HalfspaceDomain::intersect: dimension mismatch");
  auto cons = constraints_;
  cons.insert(cons.end(), other.constraints_.begin(), other.constraints_.end());
  return HalfspaceDomain(dim_, std::move(cons));
}

HalfspaceDomain HalfspaceDomain::reduced() const {
  std::vector<Halfspace> cons;
  for (const auto& h : constraints_) {
    const double nrm = h.normal.norm();
    cons.push_back({h.normal / nrm, h.bound / nrm});
  }
  for (std::size_t j = 0; j < cons.size();) {
    std::vector<Halfspace> others;
    for (std::size_t k = 0; k < cons.size(); ++k)
      if (k != j) others.push_back(cons[k]);
    const auto res = lp::maximize(closed_problem(others, dim_, cons[j].normal));
    const bool redundant =
        res.status == lp::Status::Optimal && res.value <= cons[j].bound + 1e-12 * (1.0 + std::abs(cons[j].bound));
    if (redundant) {
      cons.erase(cons.begin() + static_cast<std::ptrdiff_t>(j));
    } else {
      ++j;
    }
  }
  return HalfspaceDomain(dim_, std::move(cons));
}

HalfspaceDomain HalfspaceDomain::pullback(const Mat& y) const {
  if (y.cols() != dim_) throw std::invalid_argument("HalfspaceDomain::pullback: matrix has wrong column count");
  std::vector<Halfspace> cons;
  for (const auto& h : constraints_) {
    Vec a = y * h.normal;
    if (a.norm() == 0.0) {
      if (h.bound > 0.0) continue;  // 0 < b always true
      throw std::invalid_argument("HalfspaceDomain::pullback: empty preimage");
    }
    cons.push_back({a, h.bound});
  }
  return HalfspaceDomain(static_cast<int>(y.rows()), std::move(cons));
}

bool HalfspaceDomain::subset_of(const HalfspaceDomain& other) const {
  if (other.dim_ != dim_) throw std::invalid_argument("HalfspaceDomain::subset_of: dimension mismatch");
  for (const auto& h : other.constraints_) {
    const ExtReal s = support_function(*this, h.normal);
    if (s.is_inf()) return false;
    const double scale = 1.0 + std::abs(h.bound);
    if (s.value() > h.bound + 1e-12 * scale) return false;
  }
  return true;
}

std::optional<Vec> HalfspaceDomain::witness_not_in(const HalfspaceDomain& other) const {
  if (other.dim_ != dim_) throw std::invalid_argument("HalfspaceDomain::witness_not_in: dimension mismatch");
  for (const auto& h : other.constraints_) {
    const auto res = lp::maximize(closed_problem(constraints_, dim_, h.normal));
    const Vec& c = interior_;
    const double ac = h.normal.dot(c);
    if (ac >= h.bound) return c;
    if (res.status == lp::Status::Unbounded) {
      const Vec ray = to_vec(res.ray);
      const double slope = h.normal.dot(ray);
      const double s = (h.bound - ac) / slope + 1.0;
      return Vec(c + s * ray);
    }
    if (res.status != lp::Status::Optimal) continue;
    const double scale = 1.0 + std::abs(h.bound);
    if (res.value <= h.bound + 1e-12 * scale) continue;
    const Vec v = to_vec(res.x);
    const double theta_b = (h.bound - ac) / (res.value - ac);
    const double theta = 0.5 * (std::max(theta_b, 0.0) + 1.0);
    return Vec(c + theta * (v - c));
  }
  return std::nullopt;
}

ExtReal support_function(const HalfspaceDomain& domain, const Vec& z) {
  if (z.size() != domain.dim()) throw std::invalid_argument("support_function: dimension mismatch");
  const auto res = lp::maximize(closed_problem(domain.constraints(), domain.dim(), z));
  if (res.status == lp::Status::Unbounded) return ExtReal::infinity();
  if (res.status == lp::Status::Infeasible)
    throw std::logic_error("support_function: infeasible domain");  // excluded by construction
  return res.value;
}

ExtReal support_function_open(const HalfspaceDomain& domain, const Vec& z) {
  if (z.size() != domain.dim()) throw std::invalid_argument("support_function_open: dimension mismatch");
  std::vector<std::vector<double>> rows;
  std::vector<double> rhs;
  double eps = 1e-7;
  for (const auto& h : domain.constraints()) {
    // Normalized rows so that the tightening is a uniform distance.
    const double n = h.normal.norm();
    rows.push_back(to_std(h.normal / n));
    rhs.push_back(h.bound / n);
    eps = std::min(eps, 1e-7 * (1.0 + std::abs(h.bound / n)));
  }
  const auto v = lp::polyhedron_sup_open(rows, rhs, to_std(z), eps);
  if (!v) return ExtReal::infinity();
  return *v;
}

ExtReal indicator(const HalfspaceDomain& domain, const Vec& x, double tol) {
  return domain.in_closure(x, tol) ? ExtReal(0.0) : ExtReal::infinity();
}

ConeCert normal_cone(const HalfspaceDomain& domain, const Vec& point, double tol) {
  if (!domain.in_closure(point, tol))
    throw std::invalid_argument("normal_cone: point lies outside the closure of the domain");
  ConeCert cert;
  cert.base = point;
  for (const auto& h : domain.constraints()) {
    if (std::abs(h.normal.dot(point) - h.bound) <= tol) cert.generators.push_back(h.normal);
  }
  return cert;
}

bool in_cone(const ConeCert& cone, const Vec& v, double tol) {
  const double scale = tol * (1.0 + v.lpNorm<Eigen::Infinity>());
  if (cone.generators.empty()) return v.lpNorm<Eigen::Infinity>() <= scale;
  const std::size_t k = cone.generators.size();
  const auto dim = static_cast<std::size_t>(v.size());
  // Variables (mu_1..mu_k, e): minimize e with |G mu - v|_inf <= e, mu >= 0.
  lp::Problem<double> prob(k + 1);
  prob.objective[k] = -1.0;
  for (std::size_t i = 0; i < dim; ++i) {
    std::vector<double> up(k + 1, 0.0), down(k + 1, 0.0);
    for (std::size_t j = 0; j < k; ++j) {
      up[j] = cone.generators[j](static_cast<Eigen::Index>(i));
      down[j] = -up[j];
    }
    up[k] = -1.0;
    down[k] = -1.0;
    prob.add_le(up, v(static_cast<Eigen::Index>(i)));
    prob.add_le(down, -v(static_cast<Eigen::Index>(i)));
  }
  for (std::size_t j = 0; j < k; ++j) {
    std::vector<double> row(k + 1, 0.0);
    row[j] = -1.0;
    prob.add_le(row, 0.0);
  }
  const auto res = lp::maximize(prob);
  if (res.status != lp::Status::Optimal) return false;
  return -res.value <= scale;
}

Vec numeric_gradient(const std::function<ExtReal(const Vec&)>& fn, const Vec& x, double h) {
  Vec grad(x.size());
  auto central = [&](Eigen::Index i, double step) {
    Vec xp = x, xm = x;
    xp(i) += step;
    xm(i) -= step;
    const ExtReal fp = fn(xp), fm = fn(xm);
    if (fp.is_inf() || fm.is_inf())
      throw DiagnosticError("numeric_gradient: difference stencil leaves the effective domain");
    return (fp.value() - fm.value()) / (2.0 * step);
  };
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double d1 = central(i, h);
    const double d2 = central(i, 0.5 * h);
    grad(i) = (4.0 * d2 - d1) / 3.0;
  }
  return grad;
}

bool verify_subgradient(const std::function<ExtReal(const Vec&)>& fn, const Vec& lambda, const Vec& z,
                        double tol) {
  if (lambda.size() != z.size()) throw std::invalid_argument("verify_subgradient: dimension mismatch");
  double h = 1e-3 * std::max(1.0, lambda.lpNorm<Eigen::Infinity>());
  for (int attempt = 0; attempt < 4; ++attempt, h *= 0.1) {
    try {
      const Vec g = numeric_gradient(fn, lambda, h);
      return (g - z).lpNorm<Eigen::Infinity>() <= tol;
    } catch (const DiagnosticError&) {
    }
  }
  throw DiagnosticError("verify_subgradient: point too close to the domain boundary for stable differencing");
}

double GridBox::spacing(int axis) const {
  const auto a = static_cast<std::size_t>(axis);
  if (counts[a] <= 1) return 0.0;
  return (upper[a] - lower[a]) / (counts[a] - 1);
}

std::size_t GridBox::size() const {
  std::size_t n = 1;
  for (int c : counts) n *= static_cast<std::size_t>(c);
  return n;
}

GridFunction::GridFunction(GridBox box, std::vector<double> values) : box_(std::move(box)), values_(std::move(values)) {
  const auto d = box_.counts.size();
  if (d == 0 || box_.lower.size() != d || box_.upper.size() != d)
    throw std::invalid_argument("GridFunction: inconsistent box description");
  for (std::size_t a = 0; a < d; ++a) {
    if (box_.counts[a] < 1) throw std::invalid_argument("GridFunction: axis needs at least one node");
    if (!std::isfinite(box_.lower[a]) || !std::isfinite(box_.upper[a]) || box_.upper[a] < box_.lower[a])
      throw std::invalid_argument("GridFunction: box bounds must be finite and ordered");
  }
  if (values_.size() != box_.size()) throw std::invalid_argument("GridFunction: value count does not match grid");
  bool any_finite = false;
  for (double v : values_) {
    if (std::isnan(v) || v == -kInf) throw std::invalid_argument("GridFunction: values must be finite or +inf");
    any_finite = any_finite || std::isfinite(v);
  }
  if (!any_finite) throw std::invalid_argument("GridFunction: all values are +inf");
}

GridFunction GridFunction::sample(const GridBox& box, const std::function<ExtReal(const Vec&)>& fn) {
  std::vector<double> vals(box.size());
  GridFunction probe(box, std::vector<double>(box.size(), 0.0));
  for (std::size_t i = 0; i < vals.size(); ++i) vals[i] = fn(probe.node(i)).to_double();
  return GridFunction(box, std::move(vals));
}

std::vector<int> GridFunction::unflatten(std::size_t flat) const {
  std::vector<int> idx(box_.counts.size());
  for (std::size_t a = box_.counts.size(); a-- > 0;) {
    const auto c = static_cast<std::size_t>(box_.counts[a]);
    idx[a] = static_cast<int>(flat % c);
    flat /= c;
  }
  return idx;
}

std::size_t GridFunction::flatten(const std::vector<int>& idx) const {
  std::size_t flat = 0;
  for (std::size_t a = 0; a < box_.counts.size(); ++a)
    flat = flat * static_cast<std::size_t>(box_.counts[a]) + static_cast<std::size_t>(idx[a]);
  return flat;
}

double GridFunction::coordinate(int axis, int i) const {
  return box_.lower[static_cast<std::size_t>(axis)] + i * box_.spacing(axis);
}

Vec GridFunction::node(std::size_t flat) const {
  const auto idx = unflatten(flat);
  Vec x(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t a = 0; a < idx.size(); ++a) x(static_cast<Eigen::Index>(a)) = coordinate(static_cast<int>(a), idx[a]);
  return x;
}

GridBox slope_box(const GridFunction& g) {
  GridBox out;
  const int d = g.dim();
  for (int a = 0; a < d; ++a) {
    double lo = kInf, hi = -kInf;
    const double h = g.spacing(a);
    if (h > 0.0) {
      for (std::size_t i = 0; i < g.size(); ++i) {
        auto idx = g.unflatten(i);
        if (idx[static_cast<std::size_t>(a)] + 1 >= g.box().counts[static_cast<std::size_t>(a)]) continue;
        auto nxt = idx;
        ++nxt[static_cast<std::size_t>(a)];
        const double v0 = g.raw_values()[i];
        const double v1 = g.raw_values()[g.flatten(nxt)];
        if (!std::isfinite(v0) || !std::isfinite(v1)) continue;
        const double s = (v1 - v0) / h;
        lo = std::min(lo, s);
        hi = std::max(hi, s);
      }
    }
    if (!std::isfinite(lo)) {
      lo = -1.0;
      hi = 1.0;
    }
    if (hi - lo < 1e-12) {
      lo -= 0.5;
      hi += 0.5;
    }
    out.lower.push_back(lo);
    out.upper.push_back(hi);
    out.counts.push_back(std::max(2, g.box().counts[static_cast<std::size_t>(a)]));
  }
  return out;
}

GridFunction legendre_conjugate(const GridFunction& g, const std::optional<GridBox>& out_box) {
  const GridBox out = out_box ? *out_box : slope_box(g);
  const int d = g.dim();
  if (out.dim() != d) throw std::invalid_argument("legendre_conjugate: output box dimension mismatch");

  // u(l_1..l_a, z_{a+1}..z_d) = inf over the already processed primal axes of
  // g(l) - sum z_k l_k. Axes are processed from last to first; finally g* = -u.
  std::vector<int> shape = g.box().counts;
  std::vector<double> u = g.raw_values();
  for (int a = d - 1; a >= 0; --a) {
    const auto ua = static_cast<std::size_t>(a);
    const int n_in = shape[ua];
    const int n_out = out.counts[ua];
    std::size_t outer = 1, inner = 1;
    for (std::size_t k = 0; k < ua; ++k) outer *= static_cast<std::size_t>(shape[k]);
    for (std::size_t k = ua + 1; k < shape.size(); ++k) inner *= static_cast<std::size_t>(shape[k]);
    const double h_in = g.spacing(a);
    const double h_out = out.spacing(a);
    std::vector<double> next(outer * static_cast<std::size_t>(n_out) * inner, kInf);
    for (std::size_t o = 0; o < outer; ++o) {
      for (std::size_t in = 0; in < inner; ++in) {
        for (int j = 0; j < n_out; ++j) {
          const double z = out.lower[ua] + j * h_out;
          double best = kInf;
          for (int k = 0; k < n_in; ++k) {
            const double v = u[(o * static_cast<std::size_t>(n_in) + static_cast<std::size_t>(k)) * inner + in];
            if (!std::isfinite(v)) continue;
            const double lam = g.box().lower[ua] + k * h_in;
            best = std::min(best, v - z * lam);
          }
          next[(o * static_cast<std::size_t>(n_out) + static_cast<std::size_t>(j)) * inner + in] = best;
        }
      }
    }
    u = std::move(next);
    shape[ua] = n_out;
  }
  for (double& v : u) v = -v;
  return GridFunction(out, std::move(u));
}

double conjugation_tolerance(const GridBox& in, const GridBox& out) {
  if (in.dim() != out.dim()) throw std::invalid_argument("conjugation_tolerance: dimension mismatch");
  double tol = 0.0;
  for (int a = 0; a < in.dim(); ++a) tol += in.spacing(a) * out.spacing(a);
  return tol;
}

GridFunction inf_convolution(const GridFunction& f, const GridFunction& g) {
  if (f.dim() != g.dim()) throw std::invalid_argument("inf_convolution: dimension mismatch");
  const int d = f.dim();
  GridBox out;
  for (int a = 0; a < d; ++a) {
    const auto ua = static_cast<std::size_t>(a);
    const int nf = f.box().counts[ua], ng = g.box().counts[ua];
    const double hf = f.spacing(a), hg = g.spacing(a);
    double h = std::max(hf, hg);
    if (nf > 1 && ng > 1 && std::abs(hf - hg) > 1e-9 * h)
      throw std::invalid_argument("inf_convolution: grids must share their spacing");
    out.lower.push_back(f.box().lower[ua] + g.box().lower[ua]);
    out.counts.push_back(nf + ng - 1);
    out.upper.push_back(out.lower.back() + (nf + ng - 2) * h);
  }
  std::vector<double> vals(out.size(), kInf);
  GridFunction shape_probe(out, std::vector<double>(out.size(), 0.0));
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double fv = f.raw_values()[i];
    if (!std::isfinite(fv)) continue;
    const auto fi = f.unflatten(i);
    for (std::size_t j = 0; j < g.size(); ++j) {
      const double gv = g.raw_values()[j];
      if (!std::isfinite(gv)) continue;
      const auto gj = g.unflatten(j);
      std::vector<int> idx(static_cast<std::size_t>(d));
      for (std::size_t a = 0; a < idx.size(); ++a) idx[a] = fi[a] + gj[a];
      double& slot = vals[shape_probe.flatten(idx)];
      slot = std::min(slot, fv + gv);
    }
  }
  return GridFunction(out, std::move(vals));
}

void write_csv(std::ostream& os, const GridFunction& g) {
  os << "# grid_function dim=" << g.dim() << "\n";
  os << std::setprecision(17);
  for (int a = 0; a < g.dim(); ++a) {
    const auto ua = static_cast<std::size_t>(a);
    os << "# axis=" << a << " lower=" << g.box().lower[ua] << " upper=" << g.box().upper[ua]
       << " count=" << g.box().counts[ua] << "\n";
  }
  os << "node,value\n";
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double v = g.raw_values()[i];
    os << i << ',';
    if (std::isinf(v)) {
      os << "inf";
    } else {
      os << v;
    }
    os << '\n';
  }
}

GridFunction read_csv(std::istream& is) {
  std::string line;
  int dim = -1;
  GridBox box;
  std::vector<double> values;
  int lineno = 0;
  auto fail = [&](const std::string& msg) {
    throw std::invalid_argument("read_csv: line " + std::to_string(lineno) + ": " + msg);
  };
  bool in_rows = false;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (!in_rows && line.rfind("# grid_function dim=", 0) == 0) {
      dim = std::stoi(line.substr(20));
      continue;
    }
    if (!in_rows && line.rfind("# axis=", 0) == 0) {
      std::istringstream ss(line.substr(2));
      std::string tok;
      double lo = 0, hi = 0;
      int cnt = 0;
      int seen = 0;
      while (ss >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) fail("malformed axis token '" + tok + "'");
        const auto key = tok.substr(0, eq);
        const auto val = tok.substr(eq + 1);
        if (key == "lower") {
          lo = std::stod(val);
          ++seen;
        } else if (key == "upper") {
          hi = std::stod(val);
          ++seen;
        } else if (key == "count") {
          cnt = std::stoi(val);
          ++seen;
        }
      }
      if (seen != 3) fail("axis line needs lower, upper and count");
      box.lower.push_back(lo);
      box.upper.push_back(hi);
      box.counts.push_back(cnt);
      continue;
    }
    if (!in_rows) {
      if (line != "node,value") fail("expected header 'node,value'");
      in_rows = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) fail("expected 'node,value'");
    const auto node = std::stoull(line.substr(0, comma));
    if (node != values.size()) fail("node indices must be consecutive");
    const auto val = line.substr(comma + 1);
    values.push_back(val == "inf" ? kInf : std::stod(val));
  }
  if (dim < 1 || static_cast<int>(box.counts.size()) != dim) fail("grid header incomplete");
  return GridFunction(box, std::move(values));
}

}  // namespace ldrate
