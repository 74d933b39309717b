#pragma once

// Dense two-phase simplex for small linear programs with free variables.
//
//   maximize  c.x   subject to  A_le x <= b_le,  A_eq x = b_eq,  x in R^n.
//
// Templated on the scalar so that the same routine runs in double and in
// exact rational arithmetic (boost::multiprecision::cpp_rational). Bland's
// rule is used throughout; problem sizes here are a handful of rows.

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <type_traits>
#include <vector>

namespace ldrate::lp {

enum class Status { Optimal, Unbounded, Infeasible };

template <class T>
struct Problem {
  std::size_t num_vars = 0;
  std::vector<T> objective;
  std::vector<std::vector<T>> le_rows;
  std::vector<T> le_rhs;
  std::vector<std::vector<T>> eq_rows;
  std::vector<T> eq_rhs;

  explicit Problem(std::size_t n = 0) : num_vars(n), objective(n, T(0)) {}

  void add_le(std::vector<T> row, T rhs) {
    le_rows.push_back(std::move(row));
    le_rhs.push_back(std::move(rhs));
  }
  void add_eq(std::vector<T> row, T rhs) {
    eq_rows.push_back(std::move(row));
    eq_rhs.push_back(std::move(rhs));
  }
};

template <class T>
struct Result {
  Status status = Status::Infeasible;
  T value{};
  std::vector<T> x;    // optimal point (Optimal) or a feasible point (Unbounded)
  std::vector<T> ray;  // improving recession direction (Unbounded only)
};

template <class T>
T pivot_eps() {
  if constexpr (std::is_floating_point_v<T>) {
    return T(1e-11);
  } else {
    return T(0);
  }
}

namespace detail {

template <class T>
T abs_value(const T& v) {
  return v < T(0) ? T(-v) : v;
}

template <class T>
class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), a_(rows, std::vector<T>(cols + 1, T(0))), basis_(rows, 0) {}

  T& at(std::size_t r, std::size_t c) { return a_[r][c]; }
  const T& at(std::size_t r, std::size_t c) const { return a_[r][c]; }
  T& rhs(std::size_t r) { return a_[r][cols_]; }
  const T& rhs(std::size_t r) const { return a_[r][cols_]; }
  std::size_t& basis(std::size_t r) { return basis_[r]; }
  std::size_t basis(std::size_t r) const { return basis_[r]; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  void pivot(std::size_t pr, std::size_t pc) {
    const T p = a_[pr][pc];
    for (auto& v : a_[pr]) v /= p;
    for (std::size_t r = 0; r < rows_; ++r) {
      if (r == pr) continue;
      const T factor = a_[r][pc];
      if (factor == T(0)) continue;
      for (std::size_t c = 0; c <= cols_; ++c) a_[r][c] -= factor * a_[pr][c];
    }
    basis_[pr] = pc;
  }

  // Reduced cost of column j for objective `cost` (maximization).
  T reduced_cost(const std::vector<T>& cost, std::size_t j) const {
    T rc = cost[j];
    for (std::size_t r = 0; r < rows_; ++r) rc -= cost[basis_[r]] * a_[r][j];
    return rc;
  }

  enum class Outcome { Optimal, Unbounded };

  // Runs primal simplex with Bland's rule. Columns with allowed[j]==false never enter.
  Outcome run(const std::vector<T>& cost, const std::vector<bool>& allowed, std::size_t* unbounded_col) {
    const T eps = pivot_eps<T>();
    for (std::size_t iter = 0; iter < 10000; ++iter) {
      std::size_t enter = cols_;
      for (std::size_t j = 0; j < cols_; ++j) {
        if (!allowed[j] || is_basic(j)) continue;
        if (reduced_cost(cost, j) > eps) {
          enter = j;
          break;
        }
      }
      if (enter == cols_) return Outcome::Optimal;

      std::size_t leave = rows_;
      T best_ratio{};
      for (std::size_t r = 0; r < rows_; ++r) {
        if (a_[r][enter] > eps) {
          T ratio = a_[r][cols_] / a_[r][enter];
          if (leave == rows_ || ratio < best_ratio ||
              (ratio == best_ratio && basis_[r] < basis_[leave])) {
            leave = r;
            best_ratio = ratio;
          }
        }
      }
      if (leave == rows_) {
        *unbounded_col = enter;
        return Outcome::Unbounded;
      }
      pivot(leave, enter);
    }
    throw std::runtime_error("lp: iteration limit reached");
  }

  bool is_basic(std::size_t j) const {
    for (std::size_t r = 0; r < rows_; ++r)
      if (basis_[r] == j) return true;
    return false;
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<std::vector<T>> a_;
  std::vector<std::size_t> basis_;
};

}  // namespace detail

template <class T>
Result<T> maximize(const Problem<T>& prob) {
  const std::size_t n = prob.num_vars;
  const std::size_t n_le = prob.le_rows.size();
  const std::size_t n_eq = prob.eq_rows.size();
  const std::size_t m = n_le + n_eq;
  if (prob.objective.size() != n) throw std::invalid_argument("lp: objective size mismatch");

  // Columns: [x+ (n)] [x- (n)] [slack (n_le)] [artificial (m)]
  const std::size_t slack0 = 2 * n;
  const std::size_t art0 = slack0 + n_le;
  const std::size_t cols = art0 + m;
  detail::Tableau<T> tab(m, cols);

  for (std::size_t i = 0; i < m; ++i) {
    const bool is_le = i < n_le;
    const auto& row = is_le ? prob.le_rows[i] : prob.eq_rows[i - n_le];
    const T& rhs = is_le ? prob.le_rhs[i] : prob.eq_rhs[i - n_le];
    if (row.size() != n) throw std::invalid_argument("lp: constraint size mismatch");
    const T sign = rhs < T(0) ? T(-1) : T(1);
    for (std::size_t j = 0; j < n; ++j) {
      tab.at(i, j) = sign * row[j];
      tab.at(i, n + j) = -(sign * row[j]);
    }
    if (is_le) tab.at(i, slack0 + i) = sign;
    tab.at(i, art0 + i) = T(1);
    tab.rhs(i) = sign * rhs;
    tab.basis(i) = art0 + i;
  }

  // Phase 1: maximize -sum(artificials).
  std::vector<T> phase1(cols, T(0));
  for (std::size_t i = 0; i < m; ++i) phase1[art0 + i] = T(-1);
  std::vector<bool> allowed(cols, true);
  std::size_t ucol = 0;
  tab.run(phase1, allowed, &ucol);

  T infeas(0);
  for (std::size_t r = 0; r < m; ++r)
    if (tab.basis(r) >= art0) infeas += tab.rhs(r);
  const T feas_tol = std::is_floating_point_v<T> ? T(1e-9) : T(0);
  Result<T> result;
  if (infeas > feas_tol) {
    result.status = Status::Infeasible;
    return result;
  }

  // Drive remaining zero-level artificials out of the basis where possible.
  const T eps = pivot_eps<T>();
  for (std::size_t r = 0; r < m; ++r) {
    if (tab.basis(r) < art0) continue;
    for (std::size_t j = 0; j < art0; ++j) {
      if (detail::abs_value(tab.at(r, j)) > eps && !tab.is_basic(j)) {
        tab.pivot(r, j);
        break;
      }
    }
  }
  for (std::size_t j = art0; j < cols; ++j) allowed[j] = false;

  std::vector<T> phase2(cols, T(0));
  for (std::size_t j = 0; j < n; ++j) {
    phase2[j] = prob.objective[j];
    phase2[n + j] = -prob.objective[j];
  }
  const auto outcome = tab.run(phase2, allowed, &ucol);

  std::vector<T> std_x(cols, T(0));
  for (std::size_t r = 0; r < m; ++r) std_x[tab.basis(r)] = tab.rhs(r);
  result.x.assign(n, T(0));
  for (std::size_t j = 0; j < n; ++j) result.x[j] = std_x[j] - std_x[n + j];

  if (outcome == detail::Tableau<T>::Outcome::Unbounded) {
    std::vector<T> d(cols, T(0));
    d[ucol] = T(1);
    for (std::size_t r = 0; r < m; ++r) d[tab.basis(r)] = -tab.at(r, ucol);
    result.ray.assign(n, T(0));
    for (std::size_t j = 0; j < n; ++j) result.ray[j] = d[j] - d[n + j];
    result.status = Status::Unbounded;
    return result;
  }

  result.status = Status::Optimal;
  T value(0);
  for (std::size_t j = 0; j < n; ++j) value += prob.objective[j] * result.x[j];
  result.value = value;
  return result;
}

// sup { <z,x> : rows x <= rhs }; nullopt when unbounded. Throws on an
// infeasible system.
template <class T>
std::optional<T> polyhedron_sup(const std::vector<std::vector<T>>& rows, const std::vector<T>& rhs,
                                const std::vector<T>& z) {
  Problem<T> prob(z.size());
  prob.objective = z;
  for (std::size_t i = 0; i < rows.size(); ++i) prob.add_le(rows[i], rhs[i]);
  const auto res = maximize(prob);
  if (res.status == Status::Infeasible) throw std::invalid_argument("lp: empty polyhedron");
  if (res.status == Status::Unbounded) return std::nullopt;
  return res.value;
}

// Same value computed from the open description only: the constraints are
// tightened to rows x <= rhs - eps*scale_i and the (piecewise linear in eps)
// value is extrapolated back to eps = 0 from eps and eps/2. Exact whenever
// eps lies in the first linear piece.
template <class T>
std::optional<T> polyhedron_sup_open(const std::vector<std::vector<T>>& rows, const std::vector<T>& rhs,
                                     const std::vector<T>& z, const T& eps) {
  std::vector<T> tight1(rhs), tight2(rhs);
  for (std::size_t i = 0; i < rhs.size(); ++i) {
    tight1[i] = rhs[i] - eps;
    tight2[i] = rhs[i] - eps / T(2);
  }
  const auto s1 = polyhedron_sup(rows, tight1, z);
  const auto s2 = polyhedron_sup(rows, tight2, z);
  if (!s1 || !s2) return std::nullopt;
  return T(2) * *s2 - *s1;
}

}  // namespace ldrate::lp
