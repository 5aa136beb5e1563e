#include "tropot/polycell.hpp"

#include <algorithm>
#include <cmath>

namespace tropot {

DifferenceClosure::DifferenceClosure(std::size_t n) : n_(n), dist_(n * n) {
  for (std::size_t i = 0; i < n_; ++i) dist_[i * n_ + i] = Rational(0);
}

bool DifferenceClosure::add_upper(std::size_t upper, std::size_t lower, const Rational& bound) {
  if (!feasible_) return false;
  if (upper >= n_ || lower >= n_) throw std::out_of_range("difference constraint index");
  // Edge lower -> upper with weight `bound`.
  const auto& back = distance(upper, lower);
  if (back && *back + bound < 0) {
    feasible_ = false;
    return false;
  }
  const auto& current = distance(lower, upper);
  if (current && *current <= bound) return true;

  std::vector<std::optional<Rational>> into_lower(n_), from_upper(n_);
  for (std::size_t a = 0; a < n_; ++a) into_lower[a] = distance(a, lower);
  for (std::size_t c = 0; c < n_; ++c) from_upper[c] = distance(upper, c);
  for (std::size_t a = 0; a < n_; ++a) {
    if (!into_lower[a]) continue;
    const Rational head = *into_lower[a] + bound;
    for (std::size_t c = 0; c < n_; ++c) {
      if (!from_upper[c]) continue;
      Rational via = head + *from_upper[c];
      auto& d = dist_[a * n_ + c];
      if (!d || via < *d) d = std::move(via);
    }
  }
  for (std::size_t i = 0; i < n_; ++i) {
    if (*dist_[i * n_ + i] < 0) {
      feasible_ = false;
      return false;
    }
  }
  return true;
}

bool DifferenceClosure::add_equal(std::size_t upper, std::size_t lower, const Rational& bound) {
  return add_upper(upper, lower, bound) && add_upper(lower, upper, Rational(-bound));
}

bool DifferenceClosure::tight(std::size_t a, std::size_t b) const {
  const auto& ab = distance(a, b);
  const auto& ba = distance(b, a);
  return ab && ba && *ab + *ba == 0;
}

DifferenceClosure closure_of(const PolyCell& cell) {
  DifferenceClosure closure(cell.ambient);
  for (const auto& c : cell.equalities) {
    if (!closure.add_equal(c.upper, c.lower, c.bound)) return closure;
  }
  for (const auto& c : cell.inequalities) {
    if (!closure.add_upper(c.upper, c.lower, c.bound)) return closure;
  }
  return closure;
}

bool is_feasible(const PolyCell& cell) { return !cell.empty && closure_of(cell).feasible(); }

std::size_t exact_rank(std::vector<std::vector<Rational>> rows) {
  if (rows.empty()) return 0;
  const std::size_t cols = rows.front().size();
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols && rank < rows.size(); ++c) {
    std::size_t pivot = rank;
    while (pivot < rows.size() && rows[pivot][c] == 0) ++pivot;
    if (pivot == rows.size()) continue;
    std::swap(rows[pivot], rows[rank]);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r == rank || rows[r][c] == 0) continue;
      const Rational factor = rows[r][c] / rows[rank][c];
      for (std::size_t k = c; k < cols; ++k) rows[r][k] -= factor * rows[rank][k];
    }
    ++rank;
  }
  return rank;
}

std::size_t cell_dim(const PolyCell& cell) {
  if (cell.empty) throw EmptyCell("cell_dim: empty cell");
  const auto closure = closure_of(cell);
  if (!closure.feasible()) throw EmptyCell("cell_dim: empty cell");
  const std::size_t n = cell.ambient;
  // Implicit equalities x_a - x_b = const, written over x_1..x_{n-1}.
  std::vector<std::vector<Rational>> rows;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      if (!closure.tight(a, b)) continue;
      std::vector<Rational> row(n - 1, Rational(0));
      if (a > 0) row[a - 1] += 1;
      if (b > 0) row[b - 1] -= 1;
      rows.push_back(std::move(row));
    }
  }
  return (n - 1) - exact_rank(std::move(rows));
}

bool contains(const PolyCell& cell, const Point<Rational>& x) {
  if (x.dim() != cell.ambient) throw DimensionMismatch(cell.ambient, x.dim(), "contains");
  if (cell.empty) return false;
  for (const auto& c : cell.equalities) {
    if (x[c.upper] - x[c.lower] != c.bound) return false;
  }
  for (const auto& c : cell.inequalities) {
    if (x[c.upper] - x[c.lower] > c.bound) return false;
  }
  return true;
}

namespace {

/// Closure with an added box |x_j - x_k| ≤ B large enough that it creates no
/// new implicit equality; every distance is then finite.
DifferenceClosure boxed_closure(const PolyCell& cell) {
  if (cell.empty) throw EmptyCell("empty cell");
  Rational total(0);
  for (const auto& c : cell.equalities) total += abs(c.bound);
  for (const auto& c : cell.inequalities) total += abs(c.bound);
  const Rational box = 2 * total + 2;
  auto closure = closure_of(cell);
  if (!closure.feasible()) throw EmptyCell("empty cell");
  for (std::size_t j = 0; j < cell.ambient; ++j) {
    for (std::size_t k = 0; k < cell.ambient; ++k) {
      if (j != k) closure.add_upper(j, k, box);
    }
  }
  return closure;
}

std::vector<Rational> vertex_row(const DifferenceClosure& closure, std::size_t r) {
  std::vector<Rational> p(closure.size());
  for (std::size_t j = 0; j < closure.size(); ++j) p[j] = *closure.distance(r, j);
  return p;
}

}  // namespace

Point<Rational> interior_point(const PolyCell& cell) {
  const auto closure = boxed_closure(cell);
  const std::size_t n = cell.ambient;
  std::vector<Rational> x(n, Rational(0));
  for (std::size_t r = 0; r < n; ++r) {
    const auto p = vertex_row(closure, r);
    for (std::size_t j = 0; j < n; ++j) x[j] += p[j];
  }
  for (auto& v : x) v /= n;
  return Point<Rational>::canonical(std::move(x));
}

std::vector<Point<Rational>> sample_points(const PolyCell& cell, std::size_t count,
                                           std::mt19937_64& rng) {
  const auto closure = boxed_closure(cell);
  const std::size_t n = cell.ambient;
  std::vector<std::vector<Rational>> rows;
  for (std::size_t r = 0; r < n; ++r) rows.push_back(vertex_row(closure, r));

  Rational spread(1);
  for (const auto& row : rows) {
    for (const auto& v : row) spread = std::max(spread, Rational(abs(v)));
  }
  const long spread_int = std::max<long>(1, static_cast<long>(std::ceil(to_double(spread))));

  std::vector<Point<Rational>> out;
  out.push_back(interior_point(cell));
  std::uniform_int_distribution<int> weight(0, 6);
  std::uniform_int_distribution<long> shift(0, 2 * spread_int);
  std::bernoulli_distribution use_min_plus(0.5);
  while (out.size() < count) {
    std::vector<Rational> x(n, Rational(0));
    if (use_min_plus(rng)) {
      for (std::size_t r = 0; r < n; ++r) {
        const Rational lambda(shift(rng), 2);
        for (std::size_t j = 0; j < n; ++j) {
          const Rational v = lambda + rows[r][j];
          if (r == 0 || v < x[j]) x[j] = v;
        }
      }
    } else {
      long total = 0;
      for (std::size_t r = 0; r < n; ++r) {
        const long w = weight(rng);
        total += w;
        for (std::size_t j = 0; j < n; ++j) x[j] += w * rows[r][j];
      }
      if (total == 0) continue;
      for (auto& v : x) v /= total;
    }
    out.push_back(Point<Rational>::canonical(std::move(x)));
  }
  return out;
}

bool same_polyhedron(const PolyCell& a, const PolyCell& b) {
  if (a.ambient != b.ambient) return false;
  const bool fa = is_feasible(a);
  const bool fb = is_feasible(b);
  if (!fa || !fb) return fa == fb;
  return closure_of(a) == closure_of(b);
}

PolyCell intersect(const PolyCell& a, const PolyCell& b) {
  if (a.ambient != b.ambient) throw DimensionMismatch(a.ambient, b.ambient, "intersect");
  PolyCell out;
  out.ambient = a.ambient;
  out.equalities = a.equalities;
  out.equalities.insert(out.equalities.end(), b.equalities.begin(), b.equalities.end());
  out.inequalities = a.inequalities;
  out.inequalities.insert(out.inequalities.end(), b.inequalities.begin(), b.inequalities.end());
  out.label = a.label.united(b.label);
  out.empty = a.empty || b.empty;
  if (!out.empty) out.empty = !closure_of(out).feasible();
  return out;
}

std::vector<std::pair<double, double>> polygon_2d(const PolyCell& cell, double box) {
  if (cell.ambient != 3) throw std::invalid_argument("polygon_2d needs a cell in TPT^3");
  if (!is_feasible(cell)) return {};
  using Vertex = std::pair<double, double>;
  std::vector<Vertex> poly{{-box, -box}, {box, -box}, {box, box}, {-box, box}};

  // Half-plane a·(u, v) ≤ c from x_upper - x_lower ≤ bound with x_0 = 0.
  auto clip = [&poly](std::size_t upper, std::size_t lower, double c) {
    double a[3] = {0, 0, 0};
    a[upper] += 1;
    a[lower] -= 1;
    auto value = [&](const Vertex& p) { return a[1] * p.first + a[2] * p.second - c; };
    std::vector<Vertex> out;
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const Vertex& cur = poly[i];
      const Vertex& nxt = poly[(i + 1) % poly.size()];
      const double vc = value(cur);
      const double vn = value(nxt);
      if (vc <= 1e-12) out.push_back(cur);
      if ((vc < -1e-12 && vn > 1e-12) || (vc > 1e-12 && vn < -1e-12)) {
        const double t = vc / (vc - vn);
        out.emplace_back(cur.first + t * (nxt.first - cur.first),
                         cur.second + t * (nxt.second - cur.second));
      }
    }
    poly = std::move(out);
  };
  for (const auto& c : cell.equalities) {
    const double b = to_double(c.bound);
    clip(c.upper, c.lower, b);
    clip(c.lower, c.upper, -b);
  }
  for (const auto& c : cell.inequalities) clip(c.upper, c.lower, to_double(c.bound));

  std::vector<Vertex> dedup;
  for (const auto& p : poly) {
    if (dedup.empty() || std::abs(dedup.back().first - p.first) > 1e-9 ||
        std::abs(dedup.back().second - p.second) > 1e-9) {
      dedup.push_back(p);
    }
  }
  while (dedup.size() > 1 && std::abs(dedup.front().first - dedup.back().first) <= 1e-9 &&
         std::abs(dedup.front().second - dedup.back().second) <= 1e-9) {
    dedup.pop_back();
  }
  return dedup;
}

}  // namespace tropot
