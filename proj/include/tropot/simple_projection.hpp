#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tropot/matrix.hpp"
#include "tropot/point.hpp"

namespace tropot {

/// A tropical matrix TPT^n -> TPT^m (n > m) with at most one real entry per
/// column, stored structurally: each used column j belongs to exactly one row
/// block J_i and carries the offset M_ij. Blocks are nonempty and disjoint
/// but need not cover every column.
template <class T>
class SimpleProjection {
 public:
  struct Entry {
    std::size_t row;
    T offset;
    friend bool operator==(const Entry&, const Entry&) = default;
  };

  SimpleProjection(std::size_t rows, std::vector<std::optional<Entry>> columns)
      : rows_(rows), columns_(std::move(columns)) {
    if (columns_.size() <= rows_) {
      throw std::invalid_argument("simple projection needs n > m (got m=" + std::to_string(rows_) +
                                  ", n=" + std::to_string(columns_.size()) + ")");
    }
    std::vector<bool> used(rows_, false);
    for (const auto& c : columns_) {
      if (!c) continue;
      if (c->row >= rows_) throw std::invalid_argument("simple projection: row index out of range");
      require_finite(c->offset, "simple projection offset");
      used[c->row] = true;
    }
    for (std::size_t i = 0; i < rows_; ++i) {
      if (!used[i]) {
        throw std::invalid_argument("simple projection: block J_" + std::to_string(i + 1) +
                                    " is empty");
      }
    }
  }

  /// Throws if M has n ≤ m or a column with two real entries.
  static SimpleProjection from_matrix(const Matrix<T>& m) {
    std::vector<std::optional<Entry>> cols(m.cols());
    for (std::size_t j = 0; j < m.cols(); ++j) {
      for (std::size_t i = 0; i < m.rows(); ++i) {
        if (!m(i, j).is_finite()) continue;
        if (cols[j]) {
          throw std::invalid_argument("not a simple projection: column " + std::to_string(j + 1) +
                                      " has two real entries");
        }
        cols[j] = Entry{i, m(i, j).value()};
      }
    }
    return SimpleProjection(m.rows(), std::move(cols));
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return columns_.size(); }
  const std::vector<std::optional<Entry>>& columns() const { return columns_; }

  /// J_i for every row, columns ascending.
  std::vector<std::vector<std::size_t>> blocks() const {
    std::vector<std::vector<std::size_t>> out(rows_);
    for (std::size_t j = 0; j < columns_.size(); ++j) {
      if (columns_[j]) out[columns_[j]->row].push_back(j);
    }
    return out;
  }

  Matrix<T> to_matrix() const {
    std::vector<Extended<T>> e(rows_ * columns_.size());
    for (std::size_t j = 0; j < columns_.size(); ++j) {
      if (columns_[j]) e[columns_[j]->row * columns_.size() + j] = Extended<T>(columns_[j]->offset);
    }
    return Matrix<T>(rows_, columns_.size(), std::move(e));
  }

  template <class U>
  SimpleProjection<U> convert() const {
    std::vector<std::optional<typename SimpleProjection<U>::Entry>> cols(columns_.size());
    for (std::size_t j = 0; j < columns_.size(); ++j) {
      if (!columns_[j]) continue;
      if constexpr (std::is_same_v<T, U>) {
        cols[j] = typename SimpleProjection<U>::Entry{columns_[j]->row, columns_[j]->offset};
      } else {
        cols[j] = typename SimpleProjection<U>::Entry{columns_[j]->row,
                                                      convert_scalar<U>(columns_[j]->offset)};
      }
    }
    return SimpleProjection<U>(rows_, std::move(cols));
  }

  friend bool operator==(const SimpleProjection&, const SimpleProjection&) = default;

 private:
  std::size_t rows_;
  std::vector<std::optional<Entry>> columns_;
};

/// Every column has at most one real entry, and n > m.
template <class T>
bool is_simple_projection(const Matrix<T>& m) {
  if (m.cols() <= m.rows()) return false;
  for (std::size_t j = 0; j < m.cols(); ++j) {
    int real = 0;
    for (std::size_t i = 0; i < m.rows(); ++i) real += m(i, j).is_finite() ? 1 : 0;
    if (real > 1) return false;
  }
  return true;
}

/// (Px)_i = max_{j ∈ J_i}(M_ij + x_j), raw.
template <class T>
std::vector<T> apply_raw(const SimpleProjection<T>& p, std::span<const T> x) {
  if (x.size() != p.cols()) throw DimensionMismatch(p.cols(), x.size(), "apply");
  std::vector<T> out(p.rows());
  std::vector<bool> seen(p.rows(), false);
  for (std::size_t j = 0; j < p.cols(); ++j) {
    const auto& c = p.columns()[j];
    if (!c) continue;
    T v = c->offset + x[j];
    if (!seen[c->row] || out[c->row] < v) {
      out[c->row] = std::move(v);
      seen[c->row] = true;
    }
  }
  return out;
}

template <class T>
Point<T> apply(const SimpleProjection<T>& p, const Point<T>& x) {
  return Point<T>::canonical(apply_raw(p, std::span<const T>(x.coords())));
}

/// z_j = (Px)_i - max_k (Px)_k for j ∈ J_i, and 0 on unused columns.
/// Invariant under tropical scaling of x.
template <class T>
std::vector<T> z_vector(const SimpleProjection<T>& p, std::span<const T> x) {
  const auto px = apply_raw(p, x);
  T top = px.front();
  for (const auto& v : px) {
    if (top < v) top = v;
  }
  std::vector<T> z(p.cols(), T(0));
  for (std::size_t j = 0; j < p.cols(); ++j) {
    const auto& c = p.columns()[j];
    if (c) z[j] = px[c->row] - top;
  }
  return z;
}

template <class T>
std::vector<T> z_vector(const SimpleProjection<T>& p, const Point<T>& x) {
  return z_vector(p, std::span<const T>(x.coords()));
}

/// A point of TPT^n written as (image, fibre coordinate) ∈ TPT^m × F_0.
template <class T>
struct SplitPoint {
  Point<T> base;
  Point<T> fibre_part;
};

/// Whether P u ~ 0 (u lies in the fibre over the origin).
template <class T>
bool in_base_fibre(const SimpleProjection<T>& p, const Point<T>& u) {
  if (u.dim() != p.cols()) return false;
  return same_point(apply(p, u), Point<T>::origin(p.rows()));
}

/// x ↦ (Px, x - z^x).
template <class T>
SplitPoint<T> split(const SimpleProjection<T>& p, const Point<T>& x) {
  if (x.dim() != p.cols()) throw DimensionMismatch(p.cols(), x.dim(), "split");
  const auto z = z_vector(p, x);
  std::vector<T> u(x.coords());
  for (std::size_t j = 0; j < u.size(); ++j) u[j] -= z[j];
  return {apply(p, x), Point<T>::canonical(std::move(u))};
}

/// Inverse of split: (y, u) ↦ w + u with w_j = y_i - max_k y_k on J_i, 0 elsewhere.
template <class T>
Point<T> unsplit(const SimpleProjection<T>& p, const Point<T>& y, const Point<T>& u) {
  if (y.dim() != p.rows()) throw DimensionMismatch(p.rows(), y.dim(), "unsplit (base)");
  if (u.dim() != p.cols()) throw DimensionMismatch(p.cols(), u.dim(), "unsplit (fibre)");
  if (!in_base_fibre(p, u)) {
    throw std::invalid_argument("unsplit: fibre coordinate does not map to the origin");
  }
  T top = y[0];
  for (std::size_t i = 1; i < y.dim(); ++i) {
    if (top < y[i]) top = y[i];
  }
  std::vector<T> x(u.coords());
  for (std::size_t j = 0; j < x.size(); ++j) {
    const auto& c = p.columns()[j];
    if (c) x[j] += y[c->row] - top;
  }
  return Point<T>::canonical(std::move(x));
}

/// The three quantities of the two-sided metric comparison between x1, x2
/// and their split coordinates.
template <class T>
struct SplitBounds {
  T base_distance;   // d_m(Px1, Px2)
  T fibre_distance;  // d_n(x1 - z1, x2 - z2)
  T distance;        // d_n(x1, x2)
  bool lower_ok;     // base/2 + fibre/4 ≤ distance
  bool upper_ok;     // distance ≤ base + fibre
};

template <class T>
SplitBounds<T> metric_split_bounds(const SimpleProjection<T>& p, const Point<T>& x1,
                                   const Point<T>& x2) {
  const auto s1 = split(p, x1);
  const auto s2 = split(p, x2);
  SplitBounds<T> b{trop_metric(s1.base, s2.base), trop_metric(s1.fibre_part, s2.fibre_part),
                   trop_metric(x1, x2), false, false};
  const T lower = b.base_distance / T(2) + b.fibre_distance / T(4);
  const T upper = b.base_distance + b.fibre_distance;
  const T slack = is_exact_v<T> ? T(0) : T(1e-9);
  b.lower_ok = lower <= b.distance + slack;
  b.upper_ok = b.distance <= upper + slack;
  return b;
}

/// The tropical seminorm of z^{x1} - z^{x2} equals d_m(Px1, Px2).
template <class T>
bool z_metric_identity(const SimpleProjection<T>& p, const Point<T>& x1, const Point<T>& x2) {
  const auto z1 = z_vector(p, x1);
  const auto z2 = z_vector(p, x2);
  const T lhs = trop_metric<T>(std::span<const T>(z1), std::span<const T>(z2));
  const T rhs = trop_metric(apply(p, x1), apply(p, x2));
  return near_equal(lhs, rhs);
}

}  // namespace tropot
