#pragma once

// Computational convex analysis on small polyhedra and regular grids:
// support functions, normal cones, discrete Legendre-Fenchel conjugation,
// infimal convolution and finite-difference subgradient checks.

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ldrate/ext_real.hpp"
#include "ldrate/types.hpp"

namespace ldrate {

// Open halfspace {x : <normal, x> < bound}.
struct Halfspace {
  Vec normal;
  double bound = 0.0;
};

// Finite intersection of open halfspaces. Always nonempty: the constructor
// finds a strictly feasible point by LP and throws otherwise.
class HalfspaceDomain {
 public:
  HalfspaceDomain(int dim, std::vector<Halfspace> constraints);

  static HalfspaceDomain whole_space(int dim) { return HalfspaceDomain(dim, {}); }

  int dim() const { return dim_; }
  const std::vector<Halfspace>& constraints() const { return constraints_; }
  bool is_whole_space() const { return constraints_.empty(); }

  // Strict membership, no tolerance.
  bool contains(const Vec& x) const;
  // Membership of the closure, up to an absolute slack `tol`.
  bool in_closure(const Vec& x, double tol) const;
  // Largest <a_j,x> - b_j over constraints (negative inside), -inf if none.
  double max_violation(const Vec& x) const;

  HalfspaceDomain intersect(const HalfspaceDomain& other) const;

  // Same set with unit normals and redundant constraints removed.
  HalfspaceDomain reduced() const;

  // {lambda in R^rows(y) : y^T lambda in *this}; y has dim() columns.
  HalfspaceDomain pullback(const Mat& y) const;

  // Strictly feasible point found at construction.
  const Vec& interior_point() const { return interior_; }

  // this ⊆ other as open sets (equivalently, closure inclusion).
  bool subset_of(const HalfspaceDomain& other) const;

  // A point strictly inside *this that is not in `other`, if one exists.
  std::optional<Vec> witness_not_in(const HalfspaceDomain& other) const;

 private:
  int dim_;
  std::vector<Halfspace> constraints_;
  Vec interior_;
};

// sup { <z, x> : x in domain }, +inf when unbounded in direction z.
// The value is the same for the open domain and its closure.
ExtReal support_function(const HalfspaceDomain& domain, const Vec& z);

// Support function evaluated from strictly tightened constraints only
// (value extrapolated to zero tightening). Agrees with support_function.
ExtReal support_function_open(const HalfspaceDomain& domain, const Vec& z);

// Indicator of a halfspace domain's closure (0 inside, +inf outside).
ExtReal indicator(const HalfspaceDomain& domain, const Vec& x, double tol = 0.0);

// Normal cone certificate at a point of the closure.
struct ConeCert {
  std::vector<Vec> generators;  // outward normals of active constraints; empty = {0}
  Vec base;
};

inline constexpr double kActiveTol = 1e-8;

ConeCert normal_cone(const HalfspaceDomain& domain, const Vec& point, double tol = kActiveTol);

// Whether v is a nonnegative combination of the cone generators, with an
// absolute residual tolerance scaled by (1 + |v|).
bool in_cone(const ConeCert& cone, const Vec& v, double tol = 1e-8);

// Gradient by central differences with one Richardson step.
Vec numeric_gradient(const std::function<ExtReal(const Vec&)>& fn, const Vec& x, double h = 1e-3);

// True iff |grad fn(lambda) - z|_inf <= tol. Throws DiagnosticError when the
// difference stencil leaves the effective domain of fn.
bool verify_subgradient(const std::function<ExtReal(const Vec&)>& fn, const Vec& lambda, const Vec& z,
                        double tol);

// Axis-aligned regular grid description.
struct GridBox {
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<int> counts;

  int dim() const { return static_cast<int>(counts.size()); }
  double spacing(int axis) const;
  std::size_t size() const;
};

// Extended-real function sampled on a regular grid. Values are stored
// row-major (axis 0 slowest); +inf marks points outside the effective domain.
class GridFunction {
 public:
  GridFunction(GridBox box, std::vector<double> values);

  static GridFunction sample(const GridBox& box, const std::function<ExtReal(const Vec&)>& fn);

  const GridBox& box() const { return box_; }
  int dim() const { return box_.dim(); }
  std::size_t size() const { return values_.size(); }
  double spacing(int axis) const { return box_.spacing(axis); }

  std::vector<int> unflatten(std::size_t flat) const;
  std::size_t flatten(const std::vector<int>& idx) const;
  Vec node(std::size_t flat) const;
  double coordinate(int axis, int i) const;

  ExtReal value(std::size_t flat) const { return ExtReal(values_[flat]); }
  const std::vector<double>& raw_values() const { return values_; }

 private:
  GridBox box_;
  std::vector<double> values_;
};

// Box covering the finite-difference slope range of g along each axis.
GridBox slope_box(const GridFunction& g);

// Discrete conjugate: node-wise sup over input nodes of <lambda, z> - g(lambda).
// Output on `out` if given, otherwise on slope_box(g).
GridFunction legendre_conjugate(const GridFunction& g, const std::optional<GridBox>& out = std::nullopt);

// Error scale of a discrete conjugation between the two grids.
double conjugation_tolerance(const GridBox& in, const GridBox& out);

// Node-wise inf over splits z1 + z2 = z with z1, z2 on the input grids.
// Both grids must share the spacing on every axis where both have > 1 node.
GridFunction inf_convolution(const GridFunction& f, const GridFunction& g);

void write_csv(std::ostream& os, const GridFunction& g);
GridFunction read_csv(std::istream& is);

}  // namespace ldrate
