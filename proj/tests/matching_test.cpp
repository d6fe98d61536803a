// Copyright 2026 The gnsstopo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "gnsstopo/matching.hpp"

namespace gnsstopo {
namespace {

struct Best {
  int cardinality = -1;
  std::int64_t weight = 0;
  std::vector<int> mate;
};

// Lexicographic key in which being exposed sorts after every partner.
std::vector<int> lex_key(const std::vector<int>& mate) {
  std::vector<int> k = mate;
  for (int& x : k)
    if (x < 0) x = 1 << 20;
  return k;
}

void enumerate(int n, const std::vector<WeightedEdge>& edges, std::size_t k, std::vector<int>& mate, int card,
               std::int64_t weight, MatchingMode mode, Best& best) {
  if (k == edges.size()) {
    bool better;
    if (mode == MatchingMode::perfect_preferred) {
      better = card > best.cardinality || (card == best.cardinality && weight > best.weight);
    } else {
      better = best.cardinality < 0 || weight > best.weight;
    }
    bool tie = mode == MatchingMode::perfect_preferred ? (card == best.cardinality && weight == best.weight)
                                                      : (weight == best.weight && best.cardinality >= 0);
    if (better || (tie && lex_key(mate) < lex_key(best.mate))) {
      best.cardinality = card;
      best.weight = weight;
      best.mate = mate;
    }
    return;
  }
  enumerate(n, edges, k + 1, mate, card, weight, mode, best);
  const auto& e = edges[k];
  if (mate[e.u] < 0 && mate[e.v] < 0 && (mode == MatchingMode::perfect_preferred || e.weight > 0)) {
    mate[e.u] = e.v;
    mate[e.v] = e.u;
    enumerate(n, edges, k + 1, mate, card + 1, weight + e.weight, mode, best);
    mate[e.u] = mate[e.v] = -1;
  }
}

Best brute_force(int n, const std::vector<WeightedEdge>& edges, MatchingMode mode) {
  Best best;
  std::vector<int> mate(n, -1);
  enumerate(n, edges, 0, mate, 0, 0, mode, best);
  return best;
}

std::vector<WeightedEdge> random_graph(std::mt19937_64& rng, int n, double density, int lo, int hi) {
  std::uniform_real_distribution<double> coin(0, 1);
  std::uniform_int_distribution<int> w(lo, hi);
  std::vector<WeightedEdge> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (coin(rng) < density) edges.push_back({i, j, w(rng)});
  return edges;
}

TEST(Matching, EmptyGraph) {
  auto r = canonical_matching(4, {});
  EXPECT_EQ(r.cardinality, 0);
  EXPECT_EQ(r.mate, std::vector<int>(4, -1));
}

TEST(Matching, PrefersCardinalityOverWeight) {
  // Path 0-1-2-3 with a heavy middle edge.
  std::vector<WeightedEdge> e{{0, 1, 1}, {1, 2, 100}, {2, 3, 1}};
  auto perfect = canonical_matching(4, e);
  EXPECT_EQ(perfect.cardinality, 2);
  EXPECT_EQ(perfect.weight, 2);
  auto plain = canonical_matching(4, e, MatchingMode::non_perfect);
  EXPECT_EQ(plain.cardinality, 1);
  EXPECT_EQ(plain.weight, 100);
}

TEST(Matching, NegativeWeightsStillMatchedWhenPerfectPreferred) {
  std::vector<WeightedEdge> e{{0, 1, -50}, {2, 3, -50}, {0, 2, 5}};
  auto r = canonical_matching(4, e);
  EXPECT_EQ(r.cardinality, 2);
  EXPECT_EQ(r.weight, -100);
  auto plain = canonical_matching(4, e, MatchingMode::non_perfect);
  EXPECT_EQ(plain.weight, 5);
}

TEST(Matching, TieBreakIsLexicographic) {
  // Square with equal weights: both perfect matchings tie, 0 takes 1.
  std::vector<WeightedEdge> e{{2, 3, 7}, {0, 3, 7}, {1, 2, 7}, {0, 1, 7}};
  auto r = canonical_matching(4, e);
  EXPECT_EQ(r.mate, (std::vector<int>{1, 0, 3, 2}));
}

TEST(Matching, ParallelEdgesKeepHeaviest) {
  std::vector<WeightedEdge> e{{0, 1, 3}, {1, 0, 9}};
  auto r = canonical_matching(2, e);
  EXPECT_EQ(r.weight, 9);
}

TEST(Matching, SelfLoopRejected) {
  EXPECT_THROW(canonical_matching(2, {{1, 1, 3}}), std::invalid_argument);
}

TEST(Matching, CertificateHoldsOnRandomGraphs) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    int n = 2 + trial % 14;
    auto edges = random_graph(rng, n, 0.5, 1, 40);
    detail::BlossomSolver s(n, edges);
    s.solve();
    EXPECT_TRUE(s.verify_certificate()) << "trial " << trial;
  }
}

class MatchingBruteForce : public ::testing::TestWithParam<int> {};

TEST_P(MatchingBruteForce, AgreesWithEnumeration) {
  std::mt19937_64 rng(1000 + GetParam());
  for (int trial = 0; trial < 60; ++trial) {
    int n = 2 + (trial % 8);
    // Narrow weight range to force many ties.
    auto edges = random_graph(rng, n, 0.55, -3, 4);
    for (auto mode : {MatchingMode::perfect_preferred, MatchingMode::non_perfect}) {
      auto expect = brute_force(n, edges, mode);
      auto got = canonical_matching(n, edges, mode);
      ASSERT_EQ(got.weight, expect.weight) << "n=" << n << " trial=" << trial;
      if (mode == MatchingMode::perfect_preferred) ASSERT_EQ(got.cardinality, expect.cardinality);
      ASSERT_EQ(got.mate, expect.mate) << "n=" << n << " trial=" << trial;
      auto any = maximum_weight_matching(n, edges, mode);
      ASSERT_EQ(any.weight, expect.weight);
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, MatchingBruteForce, ::testing::Range(0, 8));

TEST(Matching, QuantizeIsExactOnGrid) {
  EXPECT_EQ(quantize_weight(12.5, 2.0), 25);
  EXPECT_EQ(quantize_weight(-0.25, 4.0), -1);
  EXPECT_THROW(quantize_weight(1e300, 1.0), std::overflow_error);
}

}  // namespace
}  // namespace gnsstopo
