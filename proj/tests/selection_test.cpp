// Copyright 2026 The hipar Authors
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

#include <random>

#include "oracles.hpp"
#include "test_support.hpp"

namespace hipar {
namespace {

HybridRule rule(std::vector<Condition> conds, double error, std::size_t support) {
  HybridRule r;
  r.pattern = Pattern(std::move(conds));
  r.fitted.holdout_error = error;
  r.fitted.train_error = error;
  r.support_abs = support;
  r.is_default = r.pattern.empty();
  return r;
}

std::vector<std::size_t> indices_of(unsigned long mask, std::size_t n) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < n; ++i)
    if (mask >> i & 1UL) out.push_back(i);
  return out;
}

TEST(BuildProblem, HandArithmetic) {
  auto d = testing::table1();
  auto sp = build_problem({rule({Condition::equals("property-type", "cottage")}, 1.0, 10),
                           rule({Condition::equals("property-type", "apartment")}, 3.0, 10)},
                          1.0, 1.0, d);
  EXPECT_DOUBLE_EQ(sp.normalized_error[0], 0.25);
  EXPECT_DOUBLE_EQ(sp.normalized_error[1], 0.75);
  EXPECT_DOUBLE_EQ(sp.normalized_support[0], 0.5);
  EXPECT_DOUBLE_EQ(sp.alpha[0], 2.0);
  EXPECT_NEAR(sp.alpha[1], 2.0 / 3.0, 1e-15);
  EXPECT_DOUBLE_EQ(sp.jaccard(0, 1), 0.0);
}

TEST(BuildProblem, ZeroSupportBiasIgnoresSupport) {
  auto d = testing::table1();
  auto sp = build_problem({rule({Condition::equals("property-type", "cottage")}, 1.0, 3),
                           rule({Condition::equals("state", "good")}, 3.0, 200)},
                          0.0, 1.0, d);
  EXPECT_DOUBLE_EQ(sp.alpha[0], 1.0 / 0.25);
  EXPECT_DOUBLE_EQ(sp.alpha[1], 1.0 / 0.75);
}

TEST(BuildProblem, SingletonAndZeroError) {
  auto d = testing::table1();
  auto one = build_problem({rule({}, 2.0, 6)}, 1.0, 1.0, d);
  EXPECT_DOUBLE_EQ(one.normalized_error[0], 1.0);
  EXPECT_DOUBLE_EQ(one.normalized_support[0], 1.0);
  EXPECT_DOUBLE_EQ(one.alpha[0], 1.0);
  auto zero = build_problem({rule({Condition::equals("state", "good")}, 0.0, 2), rule({}, 1.0, 6)},
                            1.0, 1.0, d);
  EXPECT_GT(zero.normalized_error[0], 0.0);
  EXPECT_TRUE(std::isfinite(zero.alpha[0]));
  EXPECT_THROW(build_problem({}, 1.0, 1.0, d), InputError);
}

TEST(Solve, NoOverlapPenaltySelectsAll) {
  std::mt19937_64 rng(1);
  auto sp = testing::random_problem(rng, 10, 0.0);
  auto rs = solve(sp);
  EXPECT_EQ(rs.chosen.size(), 10u);
  EXPECT_TRUE(rs.proof);
}

TEST(Solve, IdenticalRegionsKeepTheBetter) {
  auto d = testing::table1();
  auto sp = build_problem(
      {rule({Condition::equals("state", "good")}, 1.0, 10),
       rule({Condition::equals("property-type", "apartment"), Condition::equals("state", "good")}, 3.0, 10)},
      1.0, 1.0, d);
  ASSERT_DOUBLE_EQ(sp.jaccard(0, 1), 1.0);
  EXPECT_NEAR(objective(sp, std::vector<std::size_t>{0, 1}), 0.0, 1e-12);
  EXPECT_DOUBLE_EQ(objective(sp, std::vector<std::size_t>{0}), -2.0);
  auto rs = solve(sp);
  EXPECT_EQ(rs.chosen_indices, std::vector<std::size_t>{0});
}

TEST(Solve, ExactMatchesExhaustive) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 1 + rng() % 12;
    auto sp = testing::random_problem(rng, n, u(rng));
    auto rs = solve(sp);
    auto best = testing::exhaustive_selection(sp);
    EXPECT_EQ(rs.objective_value, objective(sp, indices_of(best.mask, n))) << "trial " << t;
    EXPECT_NEAR(rs.objective_value, best.value, 1e-12);
    EXPECT_EQ(rs.solver, SolverKind::exact);
  }
}

TEST(Solve, LargeInstancesUseLocalSearch) {
  std::mt19937_64 rng(3);
  auto sp = testing::random_problem(rng, 40, 1.0);
  SolveOptions opts;
  opts.seed = 4;
  auto rs = solve(sp, opts);
  EXPECT_EQ(rs.solver, SolverKind::local_search);
  EXPECT_FALSE(rs.proof);
  EXPECT_FALSE(rs.chosen.empty());
  // 1-flip local optimum
  for (std::size_t i = 0; i < sp.size(); ++i) {
    auto s = rs.chosen_indices;
    auto it = std::find(s.begin(), s.end(), i);
    if (it != s.end()) s.erase(it);
    else s.insert(std::upper_bound(s.begin(), s.end(), i), i);
    if (s.empty()) continue;
    EXPECT_GE(objective(sp, s), rs.objective_value - 1e-12);
  }
  auto again = solve(sp, opts);
  EXPECT_EQ(again.chosen_indices, rs.chosen_indices);
}

TEST(TopQ, Order) {
  std::mt19937_64 rng(5);
  auto sp = testing::random_problem(rng, 3, 1.0);
  sp.alpha = {2.0, 0.667, 1.0};
  EXPECT_EQ(select_top_q(sp, 2).chosen_indices, (std::vector<std::size_t>{0, 2}));
  EXPECT_EQ(select_top_q(sp, 1).chosen_indices, std::vector<std::size_t>{0});
  EXPECT_EQ(select_top_q(sp, 3).chosen.size(), 3u);
  EXPECT_THROW(select_top_q(sp, 0), InputError);
  EXPECT_THROW(select_top_q(sp, 4), InputError);
}

TEST(Selection, DefaultRuleTracked) {
  auto d = testing::table1();
  auto sp = build_problem({rule({Condition::equals("state", "good")}, 1.0, 2), rule({}, 5.0, 6)},
                          1.0, 1.0, d);
  auto rs = solve(sp);
  EXPECT_TRUE(rs.default_rule.rule.is_default);
}

}  // namespace
}  // namespace hipar
