#pragma once

#include <cmath>
#include <ostream>
#include <stdexcept>
#include <type_traits>
#include <utility>

#include "tropot/rational.hpp"

namespace tropot {

/// Scalars are either exact rationals (combinatorics, polyhedra) or doubles
/// (transport and optimisation).
template <class T>
inline constexpr bool is_exact_v = std::is_same_v<T, Rational>;

/// Comparison tolerance for canonical points: exact equality for rationals.
template <class T>
inline T point_tolerance() {
  if constexpr (is_exact_v<T>) {
    return T(0);
  } else {
    return T(1e-9);
  }
}

template <class T>
inline bool near_equal(const T& a, const T& b, const T& tol = point_tolerance<T>()) {
  if constexpr (is_exact_v<T>) {
    return a == b;
  } else {
    return std::abs(a - b) <= tol;
  }
}

template <class T>
inline void require_finite(const T& value, const char* what) {
  if constexpr (!is_exact_v<T>) {
    if (!std::isfinite(value)) {
      throw std::invalid_argument(std::string(what) + ": non-finite value");
    }
  }
}

template <class T>
T convert_scalar(const Rational& value) {
  if constexpr (is_exact_v<T>) {
    return value;
  } else {
    return to_double(value);
  }
}

template <class T>
T convert_scalar(double value) {
  if constexpr (is_exact_v<T>) {
    return rationalize(value);
  } else {
    return value;
  }
}

/// An element of the max-plus semiring R ∪ {−∞}.
///
/// −∞ is a tag, not a float sentinel: it is the identity of `oplus` (max)
/// and absorbing under `otimes` (+).
template <class T>
class Extended {
 public:
  /// Defaults to the additive identity −∞.
  Extended() = default;

  Extended(T value) : finite_(true), value_(std::move(value)) {  // NOLINT implicit
    require_finite(value_, "tropical scalar");
  }

  static Extended neg_inf() { return Extended(); }

  bool is_finite() const { return finite_; }
  bool is_neg_inf() const { return !finite_; }

  const T& value() const {
    if (!finite_) {
      throw std::logic_error("value() called on -inf");
    }
    return value_;
  }

  friend Extended oplus(const Extended& a, const Extended& b) {
    if (!a.finite_) return b;
    if (!b.finite_) return a;
    return a.value_ < b.value_ ? b : a;
  }

  friend Extended otimes(const Extended& a, const Extended& b) {
    if (!a.finite_ || !b.finite_) return Extended();
    return Extended(a.value_ + b.value_);
  }

  friend bool operator==(const Extended& a, const Extended& b) {
    if (a.finite_ != b.finite_) return false;
    return !a.finite_ || a.value_ == b.value_;
  }

  /// Total order with −∞ below every real.
  friend bool operator<(const Extended& a, const Extended& b) {
    if (!b.finite_) return false;
    if (!a.finite_) return true;
    return a.value_ < b.value_;
  }

  friend std::ostream& operator<<(std::ostream& os, const Extended& a) {
    if (!a.finite_) return os << "-inf";
    if constexpr (is_exact_v<T>) {
      return os << to_string(a.value_);
    } else {
      return os << a.value_;
    }
  }

 private:
  bool finite_ = false;
  T value_{};
};

}  // namespace tropot
