#include "convoscore/assignment.hpp"

#include <algorithm>
#include <limits>

#include "convoscore/errors.hpp"

namespace convoscore {

// Shortest-augmenting-path formulation with row/column potentials
// (Jonker-Volgenant style). cost is n x m with n <= m.
std::vector<int> solve_assignment_min(
    const std::vector<std::vector<double>>& cost) {
  const int n = static_cast<int>(cost.size());
  if (n == 0) return {};
  const int m = static_cast<int>(cost[0].size());
  if (m < n) throw InternalError("solve_assignment_min: needs rows <= cols");
  for (const auto& row : cost)
    if (static_cast<int>(row.size()) != m)
      throw InternalError("solve_assignment_min: ragged cost matrix");

  const double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<int> match(m + 1, 0);  // column -> row (1-based, 0 = free)

  for (int i = 1; i <= n; ++i) {
    std::vector<double> min_slack(m + 1, kInf);
    std::vector<int> prev(m + 1, 0);
    std::vector<char> used(m + 1, 0);
    int j0 = 0;
    match[0] = i;
    do {
      used[j0] = 1;
      int i0 = match[j0], j1 = 0;
      double delta = kInf;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        double slack = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (slack < min_slack[j]) {
          min_slack[j] = slack;
          prev[j] = j0;
        }
        if (min_slack[j] < delta) {
          delta = min_slack[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          min_slack[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    while (j0 != 0) {
      int j1 = prev[j0];
      match[j0] = match[j1];
      j0 = j1;
    }
  }

  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= m; ++j)
    if (match[j] != 0) row_to_col[match[j] - 1] = j - 1;
  return row_to_col;
}

std::vector<int> solve_assignment_max(
    const std::vector<std::vector<double>>& value) {
  const int n = static_cast<int>(value.size());
  if (n == 0) return {};
  const int m = static_cast<int>(value[0].size());

  // Transpose when rows outnumber columns so the solver precondition holds.
  if (n > m) {
    std::vector<std::vector<double>> t(m, std::vector<double>(n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j) t[j][i] = value[i][j];
    std::vector<int> col_to_row = solve_assignment_max(t);
    std::vector<int> row_to_col(n, -1);
    for (int j = 0; j < m; ++j)
      if (col_to_row[j] >= 0) row_to_col[col_to_row[j]] = j;
    return row_to_col;
  }

  std::vector<std::vector<double>> cost(n, std::vector<double>(m));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) cost[i][j] = -value[i][j];
  return solve_assignment_min(cost);
}

}  // namespace convoscore
