#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tropot/point.hpp"
#include "tropot/scalar.hpp"
#include "tropot/type_label.hpp"

namespace tropot {

/// Raised when a point sits on (or within tolerance of) a tie that float
/// arithmetic cannot resolve.
class DegeneratePoint : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An m×n max-plus matrix over R ∪ {−∞}; every row holds a real entry so
/// that it maps TPT^n into TPT^m.
template <class T>
class Matrix {
 public:
  using Entry = Extended<T>;

  Matrix(std::size_t rows, std::size_t cols, std::vector<Entry> entries)
      : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (rows_ == 0 || cols_ == 0) {
      throw std::invalid_argument("tropical matrix must be nonempty");
    }
    if (entries_.size() != rows_ * cols_) {
      throw std::invalid_argument("tropical matrix: expected " + std::to_string(rows_ * cols_) +
                                  " entries, got " + std::to_string(entries_.size()));
    }
    for (std::size_t i = 0; i < rows_; ++i) {
      bool any = false;
      for (std::size_t j = 0; j < cols_; ++j) any = any || (*this)(i, j).is_finite();
      if (!any) {
        throw std::invalid_argument("tropical matrix: row " + std::to_string(i + 1) +
                                    " has no real entry");
      }
    }
  }

  /// Convenience for finite matrices given row by row.
  static Matrix from_rows(const std::vector<std::vector<T>>& rows) {
    if (rows.empty()) throw std::invalid_argument("tropical matrix must be nonempty");
    std::vector<Entry> e;
    for (const auto& r : rows) {
      if (r.size() != rows.front().size()) throw std::invalid_argument("ragged matrix rows");
      for (const auto& v : r) e.emplace_back(v);
    }
    return Matrix(rows.size(), rows.front().size(), std::move(e));
  }

  /// 0 on the diagonal, −∞ elsewhere.
  static Matrix identity(std::size_t n) {
    std::vector<Entry> e(n * n);
    for (std::size_t i = 0; i < n; ++i) e[i * n + i] = Entry(T(0));
    return Matrix(n, n, std::move(e));
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const Entry& operator()(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }
  const std::vector<Entry>& entries() const { return entries_; }

  bool all_finite() const {
    for (const auto& e : entries_) {
      if (!e.is_finite()) return false;
    }
    return true;
  }

  /// Column j as a point of TPT^m (requires a finite column).
  Point<T> column(std::size_t j) const {
    std::vector<T> c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j).value();
    return Point<T>::canonical(std::move(c));
  }

  template <class U>
  Matrix<U> convert() const {
    std::vector<Extended<U>> e;
    e.reserve(entries_.size());
    for (const auto& v : entries_) {
      if (!v.is_finite()) {
        e.push_back(Extended<U>::neg_inf());
      } else if constexpr (std::is_same_v<T, U>) {
        e.emplace_back(v.value());
      } else {
        e.emplace_back(convert_scalar<U>(v.value()));
      }
    }
    return Matrix<U>(rows_, cols_, std::move(e));
  }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.entries_ == b.entries_;
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<Entry> entries_;
};

/// (Mx)_i = max_j(M_ij + x_j) on a raw representative, without canonicalizing.
template <class T>
std::vector<T> apply_raw(const Matrix<T>& m, std::span<const T> x) {
  if (x.size() != m.cols()) {
    throw DimensionMismatch(m.cols(), x.size(), "apply");
  }
  std::vector<T> out(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    bool seen = false;
    for (std::size_t j = 0; j < m.cols(); ++j) {
      const auto& e = m(i, j);
      if (!e.is_finite()) continue;
      T v = e.value() + x[j];
      if (!seen || out[i] < v) {
        out[i] = std::move(v);
        seen = true;
      }
    }
  }
  return out;
}

template <class T>
Point<T> apply(const Matrix<T>& m, const Point<T>& x) {
  return Point<T>::canonical(apply_raw(m, std::span<const T>(x.coords())));
}

/// Outcome of the residuation membership test for the image of M.
template <class T>
struct ImageMembership {
  bool member = false;
  /// Principal solution x̂; maps onto y exactly when `member`.
  Point<T> witness;
  /// A row where M x̂ falls short of y; set when not a member.
  std::optional<std::size_t> deficient_row;
};

/// Max-plus residuation: x̂_j = min over rows with M_ij real of (y_i - M_ij).
/// M x̂ ≤ y always holds, with equality exactly when y lies in the image.
template <class T>
ImageMembership<T> image_contains(const Matrix<T>& m, const Point<T>& y) {
  if (y.dim() != m.rows()) {
    throw DimensionMismatch(m.rows(), y.dim(), "image_contains");
  }
  std::vector<T> xhat(m.cols());
  std::vector<bool> has_value(m.cols(), false);
  for (std::size_t j = 0; j < m.cols(); ++j) {
    for (std::size_t i = 0; i < m.rows(); ++i) {
      const auto& e = m(i, j);
      if (!e.is_finite()) continue;
      T v = y[i] - e.value();
      if (!has_value[j] || v < xhat[j]) {
        xhat[j] = std::move(v);
        has_value[j] = true;
      }
    }
  }
  // Columns that are entirely −∞ never contribute; any finite value works.
  T fill(0);
  bool fill_set = false;
  for (std::size_t j = 0; j < m.cols(); ++j) {
    if (has_value[j] && (!fill_set || xhat[j] < fill)) {
      fill = xhat[j];
      fill_set = true;
    }
  }
  for (std::size_t j = 0; j < m.cols(); ++j) {
    if (!has_value[j]) xhat[j] = fill;
  }

  const std::vector<T> image = apply_raw(m, std::span<const T>(xhat));
  ImageMembership<T> out{true, Point<T>::canonical(xhat), std::nullopt};
  for (std::size_t i = 0; i < m.rows(); ++i) {
    if (!near_equal(image[i], y[i])) {
      out.member = false;
      out.deficient_row = i;
      break;
    }
  }
  return out;
}

/// For each row i, the columns that are real at row i and −∞ everywhere else.
template <class T>
std::vector<std::vector<std::size_t>> private_columns(const Matrix<T>& m) {
  std::vector<std::vector<std::size_t>> out(m.rows());
  for (std::size_t j = 0; j < m.cols(); ++j) {
    std::optional<std::size_t> only;
    bool several = false;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (!m(i, j).is_finite()) continue;
      if (only) several = true;
      only = i;
    }
    if (only && !several) out[*only].push_back(j);
  }
  return out;
}

/// Surjective onto TPT^m iff every row owns a column that is real only there.
template <class T>
bool is_surjective(const Matrix<T>& m) {
  for (const auto& cols : private_columns(m)) {
    if (cols.empty()) return false;
  }
  return true;
}

/// Strictly exceeds every difference between two real entries of M (and is ≥ 1).
template <class T>
T spread_bound(const Matrix<T>& m) {
  std::optional<T> lo, hi;
  for (const auto& e : m.entries()) {
    if (!e.is_finite()) continue;
    if (!lo || e.value() < *lo) lo = e.value();
    if (!hi || *hi < e.value()) hi = e.value();
  }
  return (*hi - *lo) + T(1);
}

/// Explicit preimage of y under a surjective M. Row i is driven by its private
/// column c(i) with x_{c(i)} = y_i - M_{i,c(i)}; every other column sits K
/// below its residuation bound, so no other column ties the maximum.
template <class T>
Point<T> surjectivity_witness(const Matrix<T>& m, const Point<T>& y) {
  if (y.dim() != m.rows()) {
    throw DimensionMismatch(m.rows(), y.dim(), "surjectivity_witness");
  }
  const auto owned = private_columns(m);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    if (owned[i].empty()) {
      throw std::invalid_argument("surjectivity_witness: matrix is not surjective (row " +
                                  std::to_string(i + 1) + " owns no column)");
    }
  }
  const T k = spread_bound(m);
  std::vector<T> x(m.cols(), T(0));
  std::vector<bool> driven(m.cols(), false);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const std::size_t c = owned[i].front();
    x[c] = y[i] - m(i, c).value();
    driven[c] = true;
  }
  for (std::size_t j = 0; j < m.cols(); ++j) {
    if (driven[j]) continue;
    std::optional<T> bound;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (!m(i, j).is_finite()) continue;
      T v = y[i] - m(i, j).value();
      if (!bound || v < *bound) bound = v;
    }
    if (bound) x[j] = *bound - k;
  }
  // Columns that are −∞ everywhere never matter; put them below the rest.
  T lowest = x[owned[0].front()];
  for (std::size_t j = 0; j < m.cols(); ++j) {
    if (x[j] < lowest) lowest = x[j];
  }
  for (std::size_t j = 0; j < m.cols(); ++j) {
    bool real = false;
    for (std::size_t i = 0; i < m.rows(); ++i) real = real || m(i, j).is_finite();
    if (!real) x[j] = lowest - k;
  }
  auto result = Point<T>::canonical(std::move(x));
  if (!same_point(apply(m, result), y)) {
    throw std::logic_error("surjectivity_witness: postcondition failed");
  }
  return result;
}

/// The spike target (0, ..., K, ..., 0) with K at `row`, K beyond the spread bound.
template <class T>
Point<T> spike_target(const Matrix<T>& m, std::size_t row) {
  std::vector<T> y(m.rows(), T(0));
  y[row] = spread_bound(m);
  return Point<T>::canonical(std::move(y));
}

/// S_j = { i : M_ij + x_j = (Mx)_i }. With doubles, a near-tie that is not
/// resolvable raises DegeneratePoint.
template <class T>
TypeLabel type_of(const Matrix<T>& m, const Point<T>& x) {
  if (x.dim() != m.cols()) {
    throw DimensionMismatch(m.cols(), x.dim(), "type_of");
  }
  const auto mx = apply_raw(m, std::span<const T>(x.coords()));
  TypeLabel label(m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    std::size_t hits = 0;
    for (std::size_t j = 0; j < m.cols(); ++j) {
      const auto& e = m(i, j);
      if (!e.is_finite()) continue;
      const T v = e.value() + x[j];
      if (v == mx[i]) {
        label.sets[j].push_back(i);
        ++hits;
      } else if constexpr (!is_exact_v<T>) {
        if (near_equal(v, mx[i])) {
          throw DegeneratePoint("type_of: row " + std::to_string(i + 1) +
                                " has a near-tie; use exact arithmetic");
        }
      }
    }
    if constexpr (!is_exact_v<T>) {
      if (hits > 1) {
        throw DegeneratePoint("type_of: row " + std::to_string(i + 1) +
                              " attains its maximum twice; use exact arithmetic");
      }
    }
  }
  return label;
}

}  // namespace tropot
