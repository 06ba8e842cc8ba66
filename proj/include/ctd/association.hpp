#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "ctd/gating.hpp"
#include "ctd/kalman.hpp"

namespace ctd {

/// Dense row-major cost matrix (rows = tracks, cols = detections). Cells may
/// hold kInfeasible to forbid a pairing.
class CostMatrix {
 public:
  static constexpr double kInfeasible = std::numeric_limits<double>::infinity();

  CostMatrix() = default;
  CostMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  bool feasible(std::size_t r, std::size_t c) const { return (*this)(r, c) != kInfeasible; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct AssignmentResult {
  std::vector<std::pair<std::size_t, std::size_t>> matches;  // (row, col), sorted by row
  std::vector<std::size_t> unmatched_rows;
  std::vector<std::size_t> unmatched_cols;

  double total_cost(const CostMatrix& costs) const;
};

/// Minimum-cost rectangular assignment. Matches as many feasible cells as
/// possible, minimizing total cost among those; infeasible cells are never
/// returned as matches. Deterministic for identical input.
AssignmentResult hungarian(const CostMatrix& costs);

/// Squared-Mahalanobis costs between each track and each detection, with
/// cells beyond `gate.d` marked infeasible.
CostMatrix gated_cost_matrix(std::span<const BoxState> tracks, std::span<const Measurement> dets,
                             const GateSpec& gate, const NoiseModel& noise = {});

AssignmentResult gated_assignment(std::span<const BoxState> tracks, std::span<const Measurement> dets,
                                  const GateSpec& gate, const NoiseModel& noise = {});

}  // namespace ctd
