#pragma once

#include <algorithm>
#include <compare>
#include <iterator>
#include <cstddef>
#include <string>
#include <vector>

namespace tropot {

/// The type (S_1, ..., S_n) of a point: S_j lists the rows whose maximum is
/// attained through column j. Row indices are 0-based and kept sorted.
struct TypeLabel {
  std::vector<std::vector<std::size_t>> sets;

  TypeLabel() = default;
  explicit TypeLabel(std::size_t columns) : sets(columns) {}
  explicit TypeLabel(std::vector<std::vector<std::size_t>> s) : sets(std::move(s)) {
    for (auto& set : sets) {
      std::sort(set.begin(), set.end());
      set.erase(std::unique(set.begin(), set.end()), set.end());
    }
  }

  std::size_t columns() const { return sets.size(); }

  bool contains(std::size_t column, std::size_t row) const {
    return std::binary_search(sets[column].begin(), sets[column].end(), row);
  }

  /// Every row in [0, rows) appears in some S_j.
  bool covers(std::size_t rows) const {
    std::vector<bool> seen(rows, false);
    for (const auto& set : sets) {
      for (auto r : set) {
        if (r < rows) seen[r] = true;
      }
    }
    return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
  }

  /// Nonempty S_j are pairwise disjoint and cover [0, rows).
  bool is_partition(std::size_t rows) const {
    std::vector<int> count(rows, 0);
    for (const auto& set : sets) {
      for (auto r : set) {
        if (r >= rows) return false;
        ++count[r];
      }
    }
    return std::all_of(count.begin(), count.end(), [](int c) { return c == 1; });
  }

  std::size_t empty_columns() const {
    return static_cast<std::size_t>(
        std::count_if(sets.begin(), sets.end(), [](const auto& s) { return s.empty(); }));
  }

  /// Column-wise union (S ∪ T)_j = S_j ∪ T_j.
  TypeLabel united(const TypeLabel& other) const {
    TypeLabel out(sets.size());
    for (std::size_t j = 0; j < sets.size(); ++j) {
      std::set_union(sets[j].begin(), sets[j].end(), other.sets[j].begin(), other.sets[j].end(),
                     std::back_inserter(out.sets[j]));
    }
    return out;
  }

  /// Display form with 1-based rows, e.g. "({1,2},{},{})".
  std::string to_string() const {
    std::string out = "(";
    for (std::size_t j = 0; j < sets.size(); ++j) {
      if (j) out += ",";
      out += "{";
      for (std::size_t k = 0; k < sets[j].size(); ++k) {
        if (k) out += ",";
        out += std::to_string(sets[j][k] + 1);
      }
      out += "}";
    }
    return out + ")";
  }

  friend auto operator<=>(const TypeLabel&, const TypeLabel&) = default;
  friend bool operator==(const TypeLabel&, const TypeLabel&) = default;
};

}  // namespace tropot
