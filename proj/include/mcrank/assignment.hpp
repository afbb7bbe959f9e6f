#pragma once

// Rectangular min-cost assignment (rows <= columns), Hungarian method with
// potentials. Integer costs only.

#include <cstdint>
#include <limits>
#include <vector>

#include "mcrank/core_model.hpp"

namespace mcrank {

struct AssignmentResult {
  std::int64_t cost = 0;
  std::vector<int> column_of_row;
};

inline AssignmentResult solve_assignment(const std::vector<std::vector<std::int64_t>>& cost) {
  const int rows = static_cast<int>(cost.size());
  AssignmentResult result;
  if (rows == 0) return result;
  const int cols = static_cast<int>(cost.front().size());
  if (cols < rows) throw Error("assignment needs at least as many columns as rows");

  constexpr auto inf = std::numeric_limits<std::int64_t>::max() / 4;
  std::vector<std::int64_t> u(rows + 1, 0), v(cols + 1, 0);
  std::vector<int> p(cols + 1, 0), way(cols + 1, 0);
  for (int i = 1; i <= rows; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<std::int64_t> minv(cols + 1, inf);
    std::vector<bool> used(cols + 1, false);
    do {
      used[j0] = true;
      int i0 = p[j0], j1 = 0;
      std::int64_t delta = inf;
      for (int j = 1; j <= cols; ++j) {
        if (used[j]) continue;
        auto cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= cols; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  result.column_of_row.assign(rows, -1);
  for (int j = 1; j <= cols; ++j) {
    if (p[j]) result.column_of_row[p[j] - 1] = j - 1;
  }
  for (int i = 0; i < rows; ++i) result.cost += cost[i][result.column_of_row[i]];
  return result;
}

}  // namespace mcrank
