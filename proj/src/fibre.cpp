#include "tropot/fibre.hpp"

#include <algorithm>

namespace tropot {

namespace {

void add_row_maximality(const Matrix<Rational>& m, std::size_t row, std::size_t column,
                        std::vector<DifferenceConstraint>& out) {
  const Rational& base = m(row, column).value();
  for (std::size_t k = 0; k < m.cols(); ++k) {
    if (k == column || !m(row, k).is_finite()) continue;
    // M_ij + x_j ≥ M_ik + x_k  <=>  x_k - x_j ≤ M_ij - M_ik
    out.push_back({k, column, base - m(row, k).value()});
  }
}

bool label_is_realisable(const Matrix<Rational>& m, const TypeLabel& s) {
  for (std::size_t j = 0; j < s.columns(); ++j) {
    for (auto i : s.sets[j]) {
      if (i >= m.rows() || !m(i, j).is_finite()) return false;
    }
  }
  return true;
}

/// Depth-first search over partition types: row r picks one real column.
/// Each partial system is checked for feasibility before descending.
class PartitionSearch {
 public:
  PartitionSearch(const Matrix<Rational>& m, const Point<Rational>* target)
      : m_(m), target_(target), choice_(m.rows()) {}

  std::vector<PolyCell> run() {
    DifferenceClosure closure(m_.cols());
    descend(0, closure);
    std::sort(cells_.begin(), cells_.end(),
              [](const PolyCell& a, const PolyCell& b) { return a.label < b.label; });
    return std::move(cells_);
  }

 private:
  void descend(std::size_t row, const DifferenceClosure& closure) {
    if (row == m_.rows()) {
      TypeLabel label(m_.cols());
      for (std::size_t i = 0; i < m_.rows(); ++i) label.sets[choice_[i]].push_back(i);
      cells_.push_back(target_ ? fibre_cell(m_, label, *target_) : type_cell(m_, label));
      return;
    }
    for (std::size_t j = 0; j < m_.cols(); ++j) {
      if (!m_(row, j).is_finite()) continue;
      choice_[row] = j;
      DifferenceClosure next = closure;
      std::vector<DifferenceConstraint> ineq;
      add_row_maximality(m_, row, j, ineq);
      bool ok = true;
      for (const auto& c : ineq) {
        if (!(ok = next.add_upper(c.upper, c.lower, c.bound))) break;
      }
      if (ok && target_ && row > 0) {
        const std::size_t k = choice_[0];
        const Point<Rational>& y = *target_;
        const Rational rhs = m_(0, k).value() - m_(row, j).value() + y[row] - y[0];
        ok = next.add_equal(j, k, rhs);
      }
      if (ok) descend(row + 1, next);
    }
  }

  const Matrix<Rational>& m_;
  const Point<Rational>* target_;
  std::vector<std::size_t> choice_;
  std::vector<PolyCell> cells_;
};

}  // namespace

PolyCell type_cell(const Matrix<Rational>& m, const TypeLabel& s) {
  if (s.columns() != m.cols()) throw DimensionMismatch(m.cols(), s.columns(), "type_cell");
  PolyCell cell;
  cell.ambient = m.cols();
  cell.label = s;
  if (!label_is_realisable(m, s)) {
    cell.empty = true;
    return cell;
  }
  for (std::size_t j = 0; j < s.columns(); ++j) {
    for (auto i : s.sets[j]) add_row_maximality(m, i, j, cell.inequalities);
  }
  cell.empty = !closure_of(cell).feasible();
  return cell;
}

PolyCell fibre_cell(const Matrix<Rational>& m, const TypeLabel& s, const Point<Rational>& y,
                    std::size_t reference_row) {
  if (y.dim() != m.rows()) throw DimensionMismatch(m.rows(), y.dim(), "fibre_cell");
  if (reference_row >= m.rows()) throw std::out_of_range("fibre_cell: reference row");
  PolyCell cell = type_cell(m, s);
  if (cell.empty) return cell;
  const std::size_t r = reference_row;
  for (std::size_t k = 0; k < s.columns(); ++k) {
    if (!s.contains(k, r)) continue;
    for (std::size_t j = 0; j < s.columns(); ++j) {
      for (auto i : s.sets[j]) {
        if (i == r && j == k) continue;
        cell.equalities.push_back(
            {j, k, m(r, k).value() - m(i, j).value() + y[i] - y[r]});
      }
    }
  }
  cell.empty = !closure_of(cell).feasible();
  return cell;
}

FibreComplex fibre_at(const Matrix<Rational>& m, const Point<Rational>& y) {
  if (y.dim() != m.rows()) throw DimensionMismatch(m.rows(), y.dim(), "fibre_at");
  FibreComplex out{y, {}};
  out.cells = PartitionSearch(m, &y).run();
  return out;
}

std::vector<PolyCell> partition_type_cells(const Matrix<Rational>& m) {
  return PartitionSearch(m, nullptr).run();
}

}  // namespace tropot
