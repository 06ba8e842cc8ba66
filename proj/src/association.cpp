#include "ctd/association.hpp"

#include <algorithm>

namespace ctd {
namespace {

// Stand-in cost for forbidden cells. Any single such cell outweighs every
// realistic sum of feasible costs, so the solver first maximizes the number
// of feasible matches; a post-pass drops the forbidden ones.
constexpr double kForbiddenCost = 1e9;

// Shortest-augmenting-path Hungarian method with potentials, O(n^2 m) for an
// n x m matrix with n <= m. Returns the column assigned to each row.
std::vector<std::size_t> solve_wide(const std::vector<double>& cost, std::size_t n, std::size_t m) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<std::size_t> owner(m + 1, 0);  // owner[j]: 1-based row holding column j
  std::vector<std::size_t> way(m + 1, 0);

  for (std::size_t i = 1; i <= n; ++i) {
    owner[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<bool> used(m + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = owner[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = cost[(i0 - 1) * m + (j - 1)] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[owner[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (owner[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      owner[j0] = owner[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<std::size_t> row_to_col(n, 0);
  for (std::size_t j = 1; j <= m; ++j) {
    if (owner[j] != 0) row_to_col[owner[j] - 1] = j - 1;
  }
  return row_to_col;
}

}  // namespace

double AssignmentResult::total_cost(const CostMatrix& costs) const {
  double sum = 0.0;
  for (auto [r, c] : matches) sum += costs(r, c);
  return sum;
}

AssignmentResult hungarian(const CostMatrix& costs) {
  const std::size_t rows = costs.rows();
  const std::size_t cols = costs.cols();
  AssignmentResult result;

  std::vector<std::size_t> col_of_row(rows, cols);  // cols == unmatched
  if (rows > 0 && cols > 0) {
    const bool transpose = rows > cols;
    const std::size_t n = transpose ? cols : rows;
    const std::size_t m = transpose ? rows : cols;
    std::vector<double> dense(n * m);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        const double c = transpose ? costs(j, i) : costs(i, j);
        dense[i * m + j] = c == CostMatrix::kInfeasible ? kForbiddenCost : c;
      }
    }
    const auto assigned = solve_wide(dense, n, m);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t r = transpose ? assigned[i] : i;
      const std::size_t c = transpose ? i : assigned[i];
      if (costs.feasible(r, c)) col_of_row[r] = c;
    }
  }

  std::vector<bool> col_used(cols, false);
  for (std::size_t r = 0; r < rows; ++r) {
    if (col_of_row[r] < cols) {
      result.matches.emplace_back(r, col_of_row[r]);
      col_used[col_of_row[r]] = true;
    } else {
      result.unmatched_rows.push_back(r);
    }
  }
  for (std::size_t c = 0; c < cols; ++c) {
    if (!col_used[c]) result.unmatched_cols.push_back(c);
  }
  return result;
}

CostMatrix gated_cost_matrix(std::span<const BoxState> tracks, std::span<const Measurement> dets,
                             const GateSpec& gate, const NoiseModel& noise) {
  CostMatrix costs(tracks.size(), dets.size());
  for (std::size_t r = 0; r < tracks.size(); ++r) {
    const auto m2 = mahalanobis_squared(tracks[r], dets, noise);
    for (std::size_t c = 0; c < dets.size(); ++c) {
      costs(r, c) = gate.admits(m2[c]) ? m2[c] : CostMatrix::kInfeasible;
    }
  }
  return costs;
}

AssignmentResult gated_assignment(std::span<const BoxState> tracks, std::span<const Measurement> dets,
                                  const GateSpec& gate, const NoiseModel& noise) {
  return hungarian(gated_cost_matrix(tracks, dets, gate, noise));
}

}  // namespace ctd
