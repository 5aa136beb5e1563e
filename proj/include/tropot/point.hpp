#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tropot/scalar.hpp"

namespace tropot {

class DimensionMismatch : public std::invalid_argument {
 public:
  DimensionMismatch(std::size_t expected, std::size_t got, const std::string& where)
      : std::invalid_argument(where + ": dimension mismatch (expected " + std::to_string(expected) +
                              ", got " + std::to_string(got) + ")") {}
};

/// A point of the tropical projective torus R^n / R·1, stored by its
/// canonical representative (first coordinate zero).
template <class T>
class Point {
 public:
  /// Subtracts coords[0] from every coordinate.
  static Point canonical(std::vector<T> raw) {
    if (raw.size() < 2) {
      throw std::invalid_argument("tropical point needs at least 2 coordinates");
    }
    for (const auto& c : raw) {
      require_finite(c, "tropical point");
    }
    const T shift = raw.front();
    for (auto& c : raw) {
      c -= shift;
    }
    return Point(std::move(raw));
  }

  /// The origin [0, ..., 0].
  static Point origin(std::size_t dim) { return canonical(std::vector<T>(dim, T(0))); }

  std::size_t dim() const { return coords_.size(); }
  const std::vector<T>& coords() const { return coords_; }
  const T& operator[](std::size_t i) const { return coords_[i]; }

  /// Coordinates after the leading zero, i.e. the image in R^{n-1}.
  std::vector<T> quotient_coords() const { return {coords_.begin() + 1, coords_.end()}; }

  template <class U>
  Point<U> convert() const {
    std::vector<U> out;
    out.reserve(coords_.size());
    for (const auto& c : coords_) {
      if constexpr (std::is_same_v<T, U>) {
        out.push_back(c);
      } else {
        out.push_back(convert_scalar<U>(c));
      }
    }
    return Point<U>::canonical(std::move(out));
  }

  friend bool operator==(const Point& a, const Point& b) { return a.coords_ == b.coords_; }
  friend bool operator<(const Point& a, const Point& b) { return a.coords_ < b.coords_; }

 private:
  explicit Point(std::vector<T> coords) : coords_(std::move(coords)) {}
  std::vector<T> coords_;
};

template <class T>
Point<T> canonical(std::vector<T> raw) {
  return Point<T>::canonical(std::move(raw));
}

/// Tropical metric on raw representatives: max_i(x_i - y_i) - min_i(x_i - y_i).
template <class T>
T trop_metric(std::span<const T> x, std::span<const T> y) {
  if (x.size() != y.size()) {
    throw DimensionMismatch(x.size(), y.size(), "trop_metric");
  }
  if (x.empty()) {
    return T(0);
  }
  T hi = x[0] - y[0];
  T lo = hi;
  for (std::size_t i = 1; i < x.size(); ++i) {
    const T d = x[i] - y[i];
    if (hi < d) hi = d;
    if (d < lo) lo = d;
  }
  return hi - lo;
}

template <class T>
T trop_metric(const Point<T>& x, const Point<T>& y) {
  return trop_metric<T>(std::span<const T>(x.coords()), std::span<const T>(y.coords()));
}

/// Double-max form max_{i,j}(x_i - y_i - x_j + y_j), kept for cross-checks.
template <class T>
T trop_metric_pairwise(std::span<const T> x, std::span<const T> y) {
  if (x.size() != y.size()) {
    throw DimensionMismatch(x.size(), y.size(), "trop_metric_pairwise");
  }
  T best(0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < x.size(); ++j) {
      const T d = x[i] - y[i] - x[j] + y[j];
      if (best < d) best = d;
    }
  }
  return best;
}

/// Equality of torus points; tolerance-aware for doubles.
template <class T>
bool same_point(const Point<T>& a, const Point<T>& b, const T& tol = point_tolerance<T>()) {
  if (a.dim() != b.dim()) return false;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    if (!near_equal(a[i], b[i], tol)) return false;
  }
  return true;
}

/// c ⊙ x on a raw representative.
template <class T>
std::vector<T> tropical_scale(const T& c, std::span<const T> x) {
  std::vector<T> out(x.begin(), x.end());
  for (auto& v : out) v += c;
  return out;
}

/// Coordinate-wise max_k(alphas[k] + points[k]), canonicalized.
template <class T>
Point<T> trop_combination(std::span<const Point<T>> points, std::span<const T> alphas) {
  if (points.empty()) {
    throw std::invalid_argument("trop_combination: empty generator list");
  }
  if (points.size() != alphas.size()) {
    throw std::invalid_argument("trop_combination: points and alphas differ in length");
  }
  const std::size_t n = points.front().dim();
  std::vector<T> out(n);
  for (std::size_t k = 0; k < points.size(); ++k) {
    if (points[k].dim() != n) {
      throw DimensionMismatch(n, points[k].dim(), "trop_combination");
    }
    for (std::size_t i = 0; i < n; ++i) {
      const T v = alphas[k] + points[k][i];
      if (k == 0 || out[i] < v) out[i] = v;
    }
  }
  return Point<T>::canonical(std::move(out));
}

/// Generators of a tropical convex hull: canonical, pairwise non-equivalent.
template <class T>
class HullGenerators {
 public:
  HullGenerators() = default;
  explicit HullGenerators(std::vector<Point<T>> points) {
    for (auto& p : points) add(std::move(p));
  }

  /// Returns false (and keeps the set unchanged) for a duplicate.
  bool add(Point<T> p) {
    if (!generators_.empty() && generators_.front().dim() != p.dim()) {
      throw DimensionMismatch(generators_.front().dim(), p.dim(), "HullGenerators::add");
    }
    for (const auto& g : generators_) {
      if (same_point(g, p)) return false;
    }
    generators_.push_back(std::move(p));
    return true;
  }

  const std::vector<Point<T>>& generators() const { return generators_; }
  std::size_t size() const { return generators_.size(); }

 private:
  std::vector<Point<T>> generators_;
};

}  // namespace tropot
