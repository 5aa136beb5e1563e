#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "tropot/scalar.hpp"

namespace tropot {

/// Optimal plan of a balanced transportation problem.
template <class T>
struct TransportPlan {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<T> flow;  // row-major
  T cost{};
  std::size_t pivots = 0;
  std::vector<std::size_t> basis;  // final spanning-tree cells
};

/// Transportation simplex on a dense cost matrix.
///
/// The basis is a spanning tree of the bipartite row/column graph, started by
/// the least-cost rule. The most negative reduced cost enters; after a
/// run of degenerate pivots the solver switches to Bland's rule (first
/// improving cell in row-major order enters; ties on the leaving side go to
/// the smallest cell index) until the objective moves again, so degenerate
/// pivots cannot cycle. Works with doubles and
/// with exact rationals; supply and demand must have equal totals.
///
/// A warm start (basis and flow of an earlier plan with the same supply and
/// demand) replaces the least-cost start.
template <class T>
TransportPlan<T> solve_transport(std::span<const T> supply, std::span<const T> demand,
                                 std::span<const T> cost,
                                 std::span<const std::size_t> warm_basis = {},
                                 std::span<const T> warm_flow = {}) {
  const std::size_t r = supply.size();
  const std::size_t s = demand.size();
  if (r == 0 || s == 0) throw std::invalid_argument("solve_transport: empty marginal");
  if (cost.size() != r * s) throw std::invalid_argument("solve_transport: cost matrix size");

  TransportPlan<T> plan;
  plan.rows = r;
  plan.cols = s;
  plan.flow.assign(r * s, T(0));
  std::vector<char> basic(r * s, 0);
  std::vector<std::size_t> basis;
  basis.reserve(r + s - 1);

  T eps(0);
  if constexpr (!is_exact_v<T>) {
    T scale(1);
    for (const auto& c : cost) scale = std::max(scale, T(std::abs(c)));
    eps = T(1e-12) * scale;
  }

  if (warm_basis.size() == r + s - 1 && warm_flow.size() == r * s) {
    for (auto cell : warm_basis) {
      basic[cell] = 1;
      basis.push_back(cell);
      plan.flow[cell] = warm_flow[cell];
    }
  } else {
    // Least-cost start: cells by increasing cost (ties by index); each
    // allocation retires one line, the final one retires the last row and column.
    std::vector<T> a(supply.begin(), supply.end());
    std::vector<T> b(demand.begin(), demand.end());
    std::vector<std::size_t> order(r * s);
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return cost[x] < cost[y]; });
    std::vector<char> row_open(r, 1), col_open(s, 1);
    std::size_t rows_left = r, cols_left = s;
    for (auto cell : order) {
      const std::size_t i = cell / s, j = cell % s;
      if (!row_open[i] || !col_open[j]) continue;
      T x = a[i] < b[j] ? a[i] : b[j];
      if (x < T(0)) x = T(0);
      plan.flow[cell] = x;
      basic[cell] = 1;
      basis.push_back(cell);
      a[i] -= x;
      b[j] -= x;
      if (rows_left == 1 && cols_left == 1) break;
      if ((a[i] <= b[j] && rows_left > 1) || cols_left == 1) {
        row_open[i] = 0;
        --rows_left;
      } else {
        col_open[j] = 0;
        --cols_left;
      }
    }
  }

  // Nodes 0..r-1 are rows, r..r+s-1 are columns.
  const std::size_t nodes = r + s;
  std::vector<std::vector<std::size_t>> adjacent(nodes);
  std::vector<T> u(r), v(s);
  std::vector<char> visited(nodes);
  std::vector<std::size_t> parent_cell(nodes);
  std::vector<std::size_t> parent_node(nodes);
  const std::size_t max_pivots = 100000 + 50 * r * s;
  std::size_t degenerate_run = 0;
  std::vector<std::size_t> queue, minus, plus;
  queue.reserve(nodes);

  for (;;) {
    for (auto& adj : adjacent) adj.clear();
    for (auto cell : basis) {
      adjacent[cell / s].push_back(cell);
      adjacent[r + cell % s].push_back(cell);
    }

    // Potentials with u_i + v_j = c_ij on basic cells.
    std::fill(visited.begin(), visited.end(), 0);
    queue.assign(1, 0);
    visited[0] = 1;
    u[0] = T(0);
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const std::size_t node = queue[head];
      for (auto cell : adjacent[node]) {
        const std::size_t i = cell / s, j = cell % s;
        if (node < r) {
          if (visited[r + j]) continue;
          v[j] = cost[cell] - u[i];
          visited[r + j] = 1;
          queue.push_back(r + j);
        } else {
          if (visited[i]) continue;
          u[i] = cost[cell] - v[j];
          visited[i] = 1;
          queue.push_back(i);
        }
      }
    }

    const bool bland = degenerate_run > nodes;
    std::size_t entering = r * s;
    T most_negative = -eps;
    for (std::size_t i = 0, cell = 0; i < r && !(bland && entering < r * s); ++i) {
      for (std::size_t j = 0; j < s; ++j, ++cell) {
        if (basic[cell]) continue;
        const T reduced = cost[cell] - u[i] - v[j];
        if (reduced < most_negative) {
          entering = cell;
          most_negative = reduced;
          if (bland) break;
        }
      }
    }
    if (entering == r * s) break;
    if (++plan.pivots > max_pivots) {
      throw std::logic_error("solve_transport: pivot limit exceeded");
    }

    // Tree path from the entering row to the entering column.
    const std::size_t row = entering / s;
    const std::size_t col_node = r + entering % s;
    std::fill(visited.begin(), visited.end(), 0);
    queue.assign(1, row);
    visited[row] = 1;
    for (std::size_t head = 0; head < queue.size() && !visited[col_node]; ++head) {
      const std::size_t node = queue[head];
      for (auto cell : adjacent[node]) {
        const std::size_t other = node < r ? r + cell % s : cell / s;
        if (visited[other]) continue;
        visited[other] = 1;
        parent_cell[other] = cell;
        parent_node[other] = node;
        queue.push_back(other);
      }
    }
    // Walking back from the column, cells alternate -, +, -, ..., -.
    minus.clear();
    plus.clear();
    bool sign_minus = true;
    for (std::size_t node = col_node; node != row; node = parent_node[node]) {
      (sign_minus ? minus : plus).push_back(parent_cell[node]);
      sign_minus = !sign_minus;
    }

    std::size_t leaving = minus.front();
    for (auto cell : minus) {
      if (plan.flow[cell] < plan.flow[leaving] ||
          (plan.flow[cell] == plan.flow[leaving] && cell < leaving)) {
        leaving = cell;
      }
    }
    const T theta = plan.flow[leaving];
    degenerate_run = theta == T(0) ? degenerate_run + 1 : 0;
    for (auto cell : minus) {
      plan.flow[cell] -= theta;
      if constexpr (!is_exact_v<T>) {
        if (plan.flow[cell] < T(0)) plan.flow[cell] = T(0);
      }
    }
    for (auto cell : plus) plan.flow[cell] += theta;
    plan.flow[entering] = theta;
    plan.flow[leaving] = T(0);

    basic[leaving] = 0;
    basic[entering] = 1;
    *std::find(basis.begin(), basis.end(), leaving) = entering;
  }

  plan.basis = std::move(basis);
  plan.cost = T(0);
  for (std::size_t cell = 0; cell < r * s; ++cell) {
    if (plan.flow[cell] != T(0)) plan.cost += plan.flow[cell] * cost[cell];
  }
  return plan;
}

}  // namespace tropot
