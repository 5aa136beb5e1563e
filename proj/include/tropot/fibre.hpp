#pragma once

#include <cstddef>
#include <vector>

#include "tropot/matrix.hpp"
#include "tropot/polycell.hpp"

namespace tropot {

/// The type cell X_S = { x : S ⊆ type(x) }: for each i ∈ S_j and each real
/// M_ik, M_ij + x_j ≥ M_ik + x_k. Marked empty when some i ∈ S_j has
/// M_ij = −∞ or the system is infeasible.
PolyCell type_cell(const Matrix<Rational>& m, const TypeLabel& s);

/// C^S_y = X_S ∩ B^S_y, where B^S_y holds
///   x_j - x_k = M_{rk} - M_{ij} + y_i - y_r  for r ∈ S_k, i ∈ S_j,
/// with r the reference row (row 0 by default; any row gives the same cell).
PolyCell fibre_cell(const Matrix<Rational>& m, const TypeLabel& s, const Point<Rational>& y,
                    std::size_t reference_row = 0);

/// The fibre of M over y as the list of its maximal cells: every nonempty
/// C^S_y whose type S is a partition of the rows, sorted by label.
struct FibreComplex {
  Point<Rational> target;
  std::vector<PolyCell> cells;
};

FibreComplex fibre_at(const Matrix<Rational>& m, const Point<Rational>& y);

/// Nonempty type cells whose type is a partition of the rows, sorted by label.
std::vector<PolyCell> partition_type_cells(const Matrix<Rational>& m);

/// Canonical columns generating the image of a finite M as a tropical convex
/// hull: duplicates merged, columns lying in the hull of the others dropped.
template <class T>
HullGenerators<T> image_vertices(const Matrix<T>& m) {
  if (!m.all_finite()) {
    throw std::invalid_argument(
        "image_vertices: matrix contains -inf; its image is the tropical span of the columns");
  }
  HullGenerators<T> unique;
  for (std::size_t j = 0; j < m.cols(); ++j) unique.add(m.column(j));

  std::vector<Point<T>> kept = unique.generators();
  // With two distinct generators neither lies in the hull of the other.
  for (std::size_t idx = 0; idx < kept.size() && kept.size() > 2;) {
    std::vector<Extended<T>> entries;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      for (std::size_t k = 0; k < kept.size(); ++k) {
        if (k != idx) entries.emplace_back(kept[k][i]);
      }
    }
    const Matrix<T> others(m.rows(), kept.size() - 1, std::move(entries));
    if (image_contains(others, kept[idx]).member) {
      kept.erase(kept.begin() + static_cast<std::ptrdiff_t>(idx));
    } else {
      ++idx;
    }
  }
  return HullGenerators<T>(std::move(kept));
}

}  // namespace tropot
