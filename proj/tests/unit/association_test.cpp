#include "ctd/association.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include <gtest/gtest.h>

namespace ctd {
namespace {

struct BruteForce {
  int matched = 0;
  double cost = 0.0;
};

// Enumerates every injection of the smaller side into the larger one and
// keeps the best (most feasible pairs, then least cost).
BruteForce brute_force(const CostMatrix& c) {
  const std::size_t r = c.rows(), n = c.cols();
  const bool wide = r <= n;
  const std::size_t small = wide ? r : n, large = wide ? n : r;
  std::vector<std::size_t> perm(large);
  std::iota(perm.begin(), perm.end(), 0);
  BruteForce best{-1, 0.0};
  do {
    BruteForce cur;
    for (std::size_t i = 0; i < small; ++i) {
      const std::size_t row = wide ? i : perm[i];
      const std::size_t col = wide ? perm[i] : i;
      if (c.feasible(row, col)) {
        ++cur.matched;
        cur.cost += c(row, col);
      }
    }
    if (cur.matched > best.matched || (cur.matched == best.matched && cur.cost < best.cost)) best = cur;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

void expect_partition(const AssignmentResult& a, std::size_t rows, std::size_t cols) {
  std::multiset<std::size_t> rs(a.unmatched_rows.begin(), a.unmatched_rows.end());
  std::multiset<std::size_t> cs(a.unmatched_cols.begin(), a.unmatched_cols.end());
  for (auto [r, c] : a.matches) {
    rs.insert(r);
    cs.insert(c);
  }
  ASSERT_EQ(rs.size(), rows);
  ASSERT_EQ(cs.size(), cols);
  std::size_t i = 0;
  for (auto v : rs) EXPECT_EQ(v, i++);
  i = 0;
  for (auto v : cs) EXPECT_EQ(v, i++);
}

CostMatrix random_matrix(std::mt19937_64& rng, std::size_t r, std::size_t c, double infeasible_rate = 0.0) {
  std::uniform_real_distribution<double> u(0.0, 10.0);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  CostMatrix m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = coin(rng) < infeasible_rate ? CostMatrix::kInfeasible : u(rng);
  return m;
}

TEST(Hungarian, IdentityCost) {
  CostMatrix c(3, 3, 1.0);
  for (std::size_t i = 0; i < 3; ++i) c(i, i) = 0.0;
  const auto a = hungarian(c);
  using P = std::pair<std::size_t, std::size_t>;
  EXPECT_EQ(a.matches, (std::vector<P>{{0, 0}, {1, 1}, {2, 2}}));
  EXPECT_TRUE(a.unmatched_rows.empty());
  EXPECT_TRUE(a.unmatched_cols.empty());
}

TEST(Hungarian, OneByTwo) {
  CostMatrix c(1, 2);
  c(0, 0) = 5;
  c(0, 1) = 3;
  const auto a = hungarian(c);
  ASSERT_EQ(a.matches.size(), 1u);
  EXPECT_EQ(a.matches[0], std::make_pair(std::size_t{0}, std::size_t{1}));
  EXPECT_EQ(a.unmatched_cols, std::vector<std::size_t>{0});
}

TEST(Hungarian, EmptyDimensions) {
  const auto a = hungarian(CostMatrix(0, 4));
  EXPECT_TRUE(a.matches.empty());
  EXPECT_EQ(a.unmatched_cols.size(), 4u);
  const auto b = hungarian(CostMatrix(3, 0));
  EXPECT_EQ(b.unmatched_rows.size(), 3u);
  EXPECT_TRUE(hungarian(CostMatrix()).matches.empty());
}

TEST(Hungarian, TallMatrix) {
  CostMatrix c(3, 1);
  c(0, 0) = 4;
  c(1, 0) = 1;
  c(2, 0) = 2;
  const auto a = hungarian(c);
  ASSERT_EQ(a.matches.size(), 1u);
  EXPECT_EQ(a.matches[0].first, 1u);
  EXPECT_EQ(a.unmatched_rows, (std::vector<std::size_t>{0, 2}));
}

TEST(Hungarian, NeverUsesInfeasibleCells) {
  CostMatrix c(2, 2, CostMatrix::kInfeasible);
  c(0, 0) = 1.0;
  const auto a = hungarian(c);
  ASSERT_EQ(a.matches.size(), 1u);
  EXPECT_EQ(a.matches[0], std::make_pair(std::size_t{0}, std::size_t{0}));
  EXPECT_EQ(a.unmatched_rows, std::vector<std::size_t>{1});
  EXPECT_EQ(a.unmatched_cols, std::vector<std::size_t>{1});
}

TEST(Hungarian, PrefersMoreFeasibleMatchesOverLowerCost) {
  // Matching (0,0) alone costs 0; (0,1)+(1,0) costs 18 but matches two.
  CostMatrix c(2, 2, CostMatrix::kInfeasible);
  c(0, 0) = 0.0;
  c(0, 1) = 9.0;
  c(1, 0) = 9.0;
  EXPECT_EQ(hungarian(c).matches.size(), 2u);
}

TEST(Hungarian, MatchesBruteForceOnRandomMatrices) {
  std::mt19937_64 rng(1234);
  for (std::size_t r = 1; r <= 6; ++r) {
    for (std::size_t c = 1; c <= 6; ++c) {
      for (int trial = 0; trial < 20; ++trial) {
        const auto m = random_matrix(rng, r, c);
        const auto a = hungarian(m);
        expect_partition(a, r, c);
        const auto oracle = brute_force(m);
        EXPECT_EQ(static_cast<int>(a.matches.size()), oracle.matched);
        EXPECT_NEAR(a.total_cost(m), oracle.cost, 1e-9) << r << "x" << c;
      }
    }
  }
}

TEST(Hungarian, NeverWorseThanAnyPermutationUpToSeven) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t r = 1 + rng() % 7, c = 1 + rng() % 7;
    const auto m = random_matrix(rng, r, c, 0.3);
    const auto a = hungarian(m);
    expect_partition(a, r, c);
    const auto oracle = brute_force(m);
    EXPECT_EQ(static_cast<int>(a.matches.size()), oracle.matched);
    EXPECT_LE(a.total_cost(m), oracle.cost + 1e-6);
    for (auto [i, j] : a.matches) EXPECT_TRUE(m.feasible(i, j));
  }
}

TEST(Hungarian, MatchSetInvariantUnderPositiveScaling) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> scale(0.01, 100.0);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t r = 1 + rng() % 6, c = 1 + rng() % 6;
    const auto m = random_matrix(rng, r, c, 0.2);
    const double lambda = scale(rng);
    CostMatrix scaled = m;
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j)
        if (m.feasible(i, j)) scaled(i, j) = lambda * m(i, j);
    EXPECT_EQ(hungarian(m).matches, hungarian(scaled).matches);
  }
}

TEST(Hungarian, Deterministic) {
  std::mt19937_64 rng(3);
  const auto m = random_matrix(rng, 5, 4, 0.2);
  EXPECT_EQ(hungarian(m).matches, hungarian(m).matches);
}

BoxState track_at(double cx, double cy, double h = 100.0) { return predict(initiate({cx, cy, 0.4, h})); }

TEST(GatedAssignment, DetectionAtProjectedMeanMatches) {
  const std::vector<BoxState> tracks{track_at(100, 100)};
  const auto y = project(tracks[0]).mean;
  const std::vector<Measurement> dets{{y(0), y(1), y(2), y(3)}};
  for (double p : {0.1, 0.5, 0.95}) {
    const auto a = gated_assignment(tracks, dets, gate_from_confidence(p));
    ASSERT_EQ(a.matches.size(), 1u);
  }
}

TEST(GatedAssignment, ZeroGateRejectsEverything) {
  const std::vector<BoxState> tracks{track_at(100, 100), track_at(300, 100)};
  const std::vector<Measurement> dets{{101, 100, 0.4, 100}, {301, 101, 0.4, 100}};
  const auto a = gated_assignment(tracks, dets, gate_from_confidence(0.0));
  EXPECT_TRUE(a.matches.empty());
  EXPECT_EQ(a.unmatched_rows.size(), 2u);
  EXPECT_EQ(a.unmatched_cols.size(), 2u);
}

TEST(GatedAssignment, AgreesWithGatedPermutationOracle) {
  const std::vector<BoxState> tracks{track_at(100, 100), track_at(140, 100), track_at(600, 400)};
  const std::vector<Measurement> dets{{128, 102, 0.4, 100}, {104, 99, 0.41, 101}, {900, 100, 0.4, 100}};
  const auto gate = gate_from_confidence(0.95);

  // Oracle: enumerate permutations, discard pairs violating the gate.
  std::vector<std::vector<double>> m2(3);
  for (std::size_t r = 0; r < 3; ++r) m2[r] = mahalanobis_squared(tracks[r], dets);
  std::vector<std::size_t> perm{0, 1, 2};
  int best_n = -1;
  double best_cost = 0.0;
  std::set<std::pair<std::size_t, std::size_t>> best_set;
  do {
    int n = 0;
    double cost = 0.0;
    std::set<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t r = 0; r < 3; ++r) {
      if (m2[r][perm[r]] <= gate.d) {
        ++n;
        cost += m2[r][perm[r]];
        pairs.insert({r, perm[r]});
      }
    }
    if (n > best_n || (n == best_n && cost < best_cost)) {
      best_n = n;
      best_cost = cost;
      best_set = pairs;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  const auto a = gated_assignment(tracks, dets, gate);
  const std::set<std::pair<std::size_t, std::size_t>> got(a.matches.begin(), a.matches.end());
  EXPECT_EQ(got, best_set);
  EXPECT_EQ(best_set, (std::set<std::pair<std::size_t, std::size_t>>{{0, 1}, {1, 0}}));
}

TEST(GatedAssignment, MatchesNeverExceedGate) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> pos(0.0, 400.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<BoxState> tracks;
    std::vector<Measurement> dets;
    for (int i = 0; i < 5; ++i) tracks.push_back(track_at(pos(rng), pos(rng)));
    for (int i = 0; i < 5; ++i) dets.push_back({pos(rng), pos(rng), 0.4, 100});
    const auto gate = gate_from_confidence(0.7);
    const auto costs = gated_cost_matrix(tracks, dets, gate);
    for (auto [r, c] : gated_assignment(tracks, dets, gate).matches) {
      EXPECT_LE(mahalanobis_squared(tracks[r], std::span(&dets[c], 1)).front(), gate.d);
      EXPECT_TRUE(costs.feasible(r, c));
    }
  }
}

}  // namespace
}  // namespace ctd
