#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "tropot/matrix.hpp"
#include "tropot/measure.hpp"
#include "tropot/point.hpp"
#include "tropot/simple_projection.hpp"

namespace tropot {

using Rng = std::mt19937_64;

/// A value k / den with k uniform in [-range*den, range*den].
template <class T>
T random_scalar(Rng& rng, int range, int den = 4) {
  std::uniform_int_distribution<int> d(-range * den, range * den);
  const int k = d(rng);
  if constexpr (is_exact_v<T>) {
    return Rational(k, den);
  } else {
    return static_cast<T>(k) / static_cast<T>(den);
  }
}

template <class T>
Point<T> random_point(Rng& rng, std::size_t n, int range = 10, int den = 4) {
  std::vector<T> c(n);
  for (auto& v : c) v = random_scalar<T>(rng, range, den);
  return Point<T>::canonical(std::move(c));
}

/// Each entry is −∞ with probability `neg_inf`; rows are repaired to keep
/// one real entry.
template <class T>
Matrix<T> random_matrix(Rng& rng, std::size_t m, std::size_t n, double neg_inf = 0.0,
                        int range = 5, int den = 2) {
  std::bernoulli_distribution hole(neg_inf);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::vector<Extended<T>> e(m * n);
  for (std::size_t i = 0; i < m; ++i) {
    bool any = false;
    for (std::size_t j = 0; j < n; ++j) {
      if (!hole(rng)) {
        e[i * n + j] = Extended<T>(random_scalar<T>(rng, range, den));
        any = true;
      }
    }
    if (!any) e[i * n + pick(rng)] = Extended<T>(random_scalar<T>(rng, range, den));
  }
  return Matrix<T>(m, n, std::move(e));
}

/// A generic point where column j strictly attains every row maximum it can:
/// x_j sits above all other coordinates by more than the entry spread.
/// Other coordinates have denominator 1009 to avoid accidental ties.
inline Point<Rational> random_point_dominated_by(const Matrix<Rational>& m, std::size_t j,
                                                 Rng& rng) {
  std::vector<Rational> x(m.cols());
  for (auto& v : x) v = random_scalar<Rational>(rng, 5, 1009);
  x[j] = spread_bound(m) + 11 + random_scalar<Rational>(rng, 1, 1009);
  return Point<Rational>::canonical(std::move(x));
}

/// First column with two or more real entries, if any.
template <class T>
std::optional<std::size_t> shared_column(const Matrix<T>& m) {
  for (std::size_t j = 0; j < m.cols(); ++j) {
    int real = 0;
    for (std::size_t i = 0; i < m.rows(); ++i) real += m(i, j).is_finite() ? 1 : 0;
    if (real >= 2) return j;
  }
  return std::nullopt;
}

/// Random J-structure with random offsets. Every row gets one column first;
/// the rest are assigned to a random row or, if allowed, left unused.
template <class T>
SimpleProjection<T> random_simple_projection(Rng& rng, std::size_t m, std::size_t n,
                                             bool allow_unused = true, int range = 5,
                                             int den = 2) {
  std::vector<std::size_t> order(n);
  for (std::size_t j = 0; j < n; ++j) order[j] = j;
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::optional<typename SimpleProjection<T>::Entry>> cols(n);
  std::uniform_int_distribution<std::size_t> row(0, allow_unused ? m : m - 1);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t r = k < m ? k : row(rng);
    if (r == m) continue;
    cols[order[k]] = typename SimpleProjection<T>::Entry{r, random_scalar<T>(rng, range, den)};
  }
  return SimpleProjection<T>(m, std::move(cols));
}

/// Random weights on `atoms` random points (uniform if requested).
inline DiscreteMeasure random_measure(Rng& rng, std::size_t n, std::size_t atoms,
                                      bool uniform = false, int range = 5, int den = 4) {
  std::vector<Point<double>> pts;
  for (std::size_t k = 0; k < atoms; ++k) pts.push_back(random_point<double>(rng, n, range, den));
  if (uniform) return DiscreteMeasure::uniform(std::move(pts));
  std::uniform_int_distribution<int> w(1, 8);
  std::vector<double> weights(atoms);
  double total = 0;
  for (auto& v : weights) total += (v = w(rng));
  double acc = 0;
  for (std::size_t k = 0; k + 1 < atoms; ++k) acc += (weights[k] /= total);
  weights.back() = 1.0 - acc;
  return DiscreteMeasure(std::move(pts), std::move(weights));
}

}  // namespace tropot
