#pragma once

#include <cstddef>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "tropot/point.hpp"
#include "tropot/rational.hpp"
#include "tropot/type_label.hpp"

namespace tropot {

/// x_upper - x_lower ≤ bound (or = bound when listed as an equality).
struct DifferenceConstraint {
  std::size_t upper = 0;
  std::size_t lower = 0;
  Rational bound;
};

class EmptyCell : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Shortest-path closure of a system of difference constraints on
/// x_0, ..., x_{n-1}. distance(a, b) is the tightest upper bound on x_b - x_a;
/// the system is infeasible exactly when a negative cycle appears.
class DifferenceClosure {
 public:
  explicit DifferenceClosure(std::size_t n);

  std::size_t size() const { return n_; }
  bool feasible() const { return feasible_; }

  /// Adds x_upper - x_lower ≤ bound in O(n^2). Returns feasibility.
  bool add_upper(std::size_t upper, std::size_t lower, const Rational& bound);
  bool add_equal(std::size_t upper, std::size_t lower, const Rational& bound);

  /// std::nullopt means unbounded.
  const std::optional<Rational>& distance(std::size_t from, std::size_t to) const {
    return dist_[from * n_ + to];
  }

  /// x_a - x_b is fixed on the whole (nonempty) polyhedron.
  bool tight(std::size_t a, std::size_t b) const;

  friend bool operator==(const DifferenceClosure& a, const DifferenceClosure& b) {
    return a.n_ == b.n_ && a.feasible_ == b.feasible_ && (!a.feasible_ || a.dist_ == b.dist_);
  }

 private:
  std::size_t n_;
  bool feasible_ = true;
  std::vector<std::optional<Rational>> dist_;
};

/// A convex polyhedron of TPT^n in quotient coordinates (x_0 := 0), given by
/// difference equalities and inequalities and labelled by a type.
struct PolyCell {
  std::size_t ambient = 0;
  std::vector<DifferenceConstraint> equalities;
  std::vector<DifferenceConstraint> inequalities;
  TypeLabel label;
  /// Set when the label itself is unsatisfiable (a required entry is −∞) or
  /// when the constraint system is infeasible.
  bool empty = false;
};

DifferenceClosure closure_of(const PolyCell& cell);

/// Exact feasibility of the constraint system.
bool is_feasible(const PolyCell& cell);

/// Dimension of the affine hull in the (n-1)-dimensional quotient:
/// (n-1) minus the exact rank of the implicit equalities. Throws EmptyCell.
std::size_t cell_dim(const PolyCell& cell);

/// Exact rank of a rational matrix given row-major.
std::size_t exact_rank(std::vector<std::vector<Rational>> rows);

bool contains(const PolyCell& cell, const Point<Rational>& x);

/// A point of the relative interior (all non-implicit inequalities strict).
Point<Rational> interior_point(const PolyCell& cell);

/// Random points of the cell: convex and min-plus combinations of the
/// closure's vertex rows (after intersecting with a large box).
std::vector<Point<Rational>> sample_points(const PolyCell& cell, std::size_t count,
                                           std::mt19937_64& rng);

/// Same point set (compares closures).
bool same_polyhedron(const PolyCell& a, const PolyCell& b);

/// Intersection of two cells on the same ambient space; the label is the union.
PolyCell intersect(const PolyCell& a, const PolyCell& b);

/// Vertices of the cell clipped to [-box, box]^2 in the coordinates
/// (x_1 - x_0, x_2 - x_0). Only for ambient = 3.
std::vector<std::pair<double, double>> polygon_2d(const PolyCell& cell, double box);

}  // namespace tropot
