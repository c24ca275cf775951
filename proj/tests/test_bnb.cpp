// SPDX-FileCopyrightText: Copyright (c) 2026 The Poutine Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "poutine/bnb.hpp"

namespace poutine {
namespace {

ProblemInstance knapsack() {
  ProblemInstance inst;
  inst.add_variable("x1", VarClass::Binary, 0, 1, -10);
  inst.add_variable("x2", VarClass::Binary, 0, 1, -6);
  inst.add_variable("x3", VarClass::Binary, 0, 1, -4);
  inst.add_row("cap", {{0, 5}, {1, 4}, {2, 3}}, RowSense::LessEqual, 10);
  return inst;
}

BnbBudget unlimited() { return BnbBudget{}; }

int hamming_on_binaries(const ProblemInstance& inst, std::span<const double> a, std::span<const double> b) {
  int d = 0;
  for (int j = 0; j < inst.num_vars(); ++j) {
    if (inst.var_class[j] == VarClass::Binary) d += std::llround(a[j]) != std::llround(b[j]);
  }
  return d;
}

// A uniformly drawn feasible assignment, usually far from optimal.
std::optional<Solution> random_feasible(const ProblemInstance& inst, std::mt19937_64& rng) {
  std::vector<std::vector<long long>> feasible;
  testing::for_each_assignment(inst, [&](const std::vector<long long>& x) {
    if (testing::integer_point_feasible(inst, x)) feasible.push_back(x);
  });
  if (feasible.empty()) return std::nullopt;
  const auto& x = feasible[std::uniform_int_distribution<std::size_t>(0, feasible.size() - 1)(rng)];
  return evaluate(inst, std::vector<double>(x.begin(), x.end()));
}

TEST(SolveBnb, Knapsack) {
  ProblemInstance inst = knapsack();
  const testing::BruteForce bf = testing::brute_force(inst);
  ASSERT_EQ(bf.optimum, -16.0);
  BnbResult r = solve_bnb(inst, nullptr, unlimited());
  EXPECT_EQ(r.status, BnbStatus::Optimal);
  ASSERT_TRUE(r.best);
  EXPECT_NEAR(r.best->objective, -16.0, 1e-9);
  EXPECT_EQ(r.best->values, (std::vector<double>{1, 1, 0}));
  EXPECT_NEAR(r.lower_bound, -16.0, 1e-9);
}

TEST(SolveBnb, IntegralRootTakesOneNode) {
  ProblemInstance inst;
  inst.add_variable("x", VarClass::Binary, 0, 1, -1);
  inst.add_variable("y", VarClass::GeneralInteger, 0, 9, 1);
  BnbResult r = solve_bnb(inst, nullptr, unlimited());
  EXPECT_EQ(r.status, BnbStatus::Optimal);
  EXPECT_EQ(r.nodes, 1);
}

TEST(SolveBnb, InfeasibleInstance) {
  ProblemInstance inst;
  inst.add_variable("x", VarClass::Binary, 0, 1, 1);
  inst.add_variable("y", VarClass::Binary, 0, 1, 1);
  inst.add_row("odd", {{0, 2}, {1, 2}}, RowSense::Equal, 1);
  BnbResult r = solve_bnb(inst, nullptr, unlimited());
  EXPECT_EQ(r.status, BnbStatus::Infeasible);
  EXPECT_FALSE(r.best);
}

TEST(SolveBnb, MatchesBruteForce) {
  std::mt19937_64 rng(1234);
  for (int t = 0; t < 80; ++t) {
    ProblemInstance inst = testing::random_integer_milp(rng);
    const testing::BruteForce bf = testing::brute_force(inst);
    BnbResult r = solve_bnb(inst, nullptr, unlimited());
    if (!bf.feasible) {
      EXPECT_EQ(r.status, BnbStatus::Infeasible) << "case " << t;
      continue;
    }
    ASSERT_EQ(r.status, BnbStatus::Optimal) << "case " << t;
    EXPECT_NEAR(r.best->objective, bf.optimum, 1e-6) << "case " << t;
    EXPECT_TRUE(r.best->feasible());
  }
}

TEST(SolveBnb, NodeCapReturnsValidBound) {
  std::mt19937_64 rng(77);
  for (int t = 0; t < 30; ++t) {
    ProblemInstance inst = testing::random_integer_milp(rng);
    const testing::BruteForce bf = testing::brute_force(inst);
    BnbBudget budget;
    budget.node_cap = 3;
    BnbResult r = solve_bnb(inst, nullptr, budget);
    EXPECT_LE(r.nodes, 3);
    if (bf.feasible) EXPECT_LE(r.lower_bound, bf.optimum + 1e-9);
    if (r.best) EXPECT_TRUE(r.best->feasible());
  }
}

TEST(SolveBnb, BoundSandwichAndMonotoneSink) {
  std::mt19937_64 rng(4321);
  for (int t = 0; t < 40; ++t) {
    ProblemInstance inst = testing::random_integer_milp(rng);
    const testing::BruteForce bf = testing::brute_force(inst);
    if (!bf.feasible) continue;
    std::vector<double> sunk;
    BnbOptions opts;
    opts.heuristic_period = 5;
    opts.progress = [&](double lo, double hi) {
      EXPECT_LE(lo, bf.optimum + 1e-9);
      EXPECT_GE(hi, bf.optimum - 1e-9);
    };
    BnbResult r = solve_bnb(inst, nullptr, unlimited(), [&](const Solution& s) { sunk.push_back(s.objective); },
                            opts);
    for (std::size_t i = 1; i < sunk.size(); ++i) EXPECT_LT(sunk[i], sunk[i - 1]);
    EXPECT_EQ(r.status, BnbStatus::Optimal);
  }
}

TEST(SolveBnb, WarmIncumbentIsKeptWhenOptimal) {
  ProblemInstance inst = knapsack();
  const std::vector<double> x{1, 1, 0};
  Solution warm = evaluate(inst, x);
  int calls = 0;
  BnbResult r = solve_bnb(inst, &warm, unlimited(), [&](const Solution&) { ++calls; });
  EXPECT_EQ(calls, 0);
  EXPECT_EQ(r.status, BnbStatus::Optimal);
  EXPECT_EQ(r.best->values, x);
}

TEST(SolveBnb, ProcessesNodesInCreationOrder) {
  std::mt19937_64 rng(2468);
  for (int t = 0; t < 30; ++t) {
    ProblemInstance inst = testing::random_integer_milp(rng);
    std::vector<long> order;
    BnbOptions opts;
    opts.local_search = false;
    opts.on_node = [&](long id) { order.push_back(id); };
    solve_bnb(inst, nullptr, unlimited(), {}, opts);
    for (std::size_t i = 1; i < order.size(); ++i) EXPECT_LT(order[i - 1], order[i]);
  }
}

TEST(SolveBnb, QueueCapSwitchesToBestBound) {
  std::mt19937_64 rng(97);
  for (int t = 0; t < 20; ++t) {
    ProblemInstance inst = testing::random_integer_milp(rng);
    const testing::BruteForce bf = testing::brute_force(inst);
    BnbOptions opts;
    opts.queue_cap = 2;
    BnbResult r = solve_bnb(inst, nullptr, unlimited(), {}, opts);
    if (bf.feasible) {
      ASSERT_EQ(r.status, BnbStatus::Optimal);
      EXPECT_NEAR(r.best->objective, bf.optimum, 1e-6);
    }
  }
}

TEST(Branch, MostFractionalDownFirst) {
  ProblemInstance inst;
  inst.add_variable("x1", VarClass::Binary, 0, 1, 0);
  inst.add_variable("x2", VarClass::Binary, 0, 1, 0);
  const std::vector<double> lp{0.5, 0.2};
  SearchNode root;
  long next = 1;
  auto [down, up] = branch(root, lp, inst, next);
  ASSERT_EQ(down.overrides.size(), 1u);
  EXPECT_EQ(down.overrides[0].index, 0);
  EXPECT_EQ(down.overrides[0].upper, 0.0);
  EXPECT_EQ(up.overrides[0].lower, 1.0);
  EXPECT_EQ(down.creation, 1);
  EXPECT_EQ(up.creation, 2);
  EXPECT_EQ(next, 3);
  EXPECT_EQ(down.depth, 1);
}

TEST(Branch, TieGoesToSmallestIndex) {
  ProblemInstance inst;
  inst.add_variable("x1", VarClass::GeneralInteger, 0, 5, 0);
  inst.add_variable("x2", VarClass::GeneralInteger, 0, 5, 0);
  const std::vector<double> lp{2.5, 3.5};
  EXPECT_EQ(select_branching_variable(lp, inst), 0);
  const std::vector<double> integral{2, 3};
  EXPECT_EQ(select_branching_variable(integral, inst), -1);
}

TEST(Branch, ChildBoundsNeverDropBelowParent) {
  std::mt19937_64 rng(200);
  int checked = 0;
  for (int t = 0; t < 200; ++t) {
    ProblemInstance inst = testing::random_integer_milp(rng);
    LpResult root = solve_lp(LpRelaxation{&inst, {}, std::nullopt});
    if (root.status != LpStatus::Optimal) continue;
    if (select_branching_variable(root.point, inst) < 0) continue;
    SearchNode node;
    long next = 1;
    auto [down, up] = branch(node, root.point, inst, next);
    for (const SearchNode* child : {&down, &up}) {
      LpResult r = solve_lp(LpRelaxation{&inst, child->overrides, std::nullopt});
      if (r.status == LpStatus::Optimal) EXPECT_GE(r.objective, root.objective - 1e-7);
    }
    ++checked;
  }
  EXPECT_GT(checked, 50);
}

TEST(LocalBranching, RowExpansion) {
  ProblemInstance inst;
  for (int j = 0; j < 4; ++j) inst.add_variable("x" + std::to_string(j + 1), VarClass::Binary, 0, 1, 0);
  const std::vector<double> center{1, 0, 1, 0};
  Row row = local_branching_row(inst, center, 2);
  EXPECT_EQ(row.sense, RowSense::LessEqual);
  EXPECT_EQ(row.rhs, 0.0);  // x2 + x4 + (1 - x1) + (1 - x3) <= 2
  ASSERT_EQ(row.entries.size(), 4u);
  const double coef[] = {-1, 1, -1, 1};
  for (int j = 0; j < 4; ++j) {
    EXPECT_EQ(row.entries[j].index, j);
    EXPECT_EQ(row.entries[j].value, coef[j]);
  }
}

TEST(LocalBranching, VacuousRadius) {
  ProblemInstance inst = knapsack();
  const std::vector<double> center{1, 0, 0};
  EXPECT_EQ(with_local_branching_row(inst, center, 3).num_rows(), inst.num_rows());
  EXPECT_EQ(with_local_branching_row(inst, center, 2).num_rows(), inst.num_rows() + 1);
}

TEST(LocalBranching, ImprovementsStayInsideTheBall) {
  std::mt19937_64 rng(500);
  int improved = 0;
  for (int t = 0; t < 500; ++t) {
    ProblemInstance inst = testing::random_integer_milp(rng);
    auto seed = random_feasible(inst, rng);
    if (!seed) continue;
    const int k = 1 + t % 3;
    auto s = local_branching(inst, *seed, k, sub_mip_budget(Deadline::never()));
    if (!s) continue;
    ++improved;
    EXPECT_LE(hamming_on_binaries(inst, s->values, seed->values), k);
    EXPECT_LT(s->objective, seed->objective);
    EXPECT_TRUE(evaluate(inst, s->values).feasible());
  }
  EXPECT_GT(improved, 20);
}

TEST(Lns, BoundaryFractions) {
  ProblemInstance inst = knapsack();
  const std::vector<double> x{0, 0, 1};
  Solution inc = evaluate(inst, x);
  std::mt19937_64 rng(1);
  auto full = lns(inst, inc, 1.0, rng, sub_mip_budget(Deadline::never()));
  ASSERT_TRUE(full);
  EXPECT_EQ(full->objective, -16.0);
  EXPECT_FALSE(lns(inst, inc, 0.0, rng, sub_mip_budget(Deadline::never())));
}

TEST(Lns, PolishesContinuousColumnsWhenEverythingIsFixed) {
  ProblemInstance inst;
  inst.add_variable("b", VarClass::Binary, 0, 1, 1);
  inst.add_variable("y", VarClass::Continuous, 0, 10, 1);
  inst.add_row("r", {{0, 1}, {1, 1}}, RowSense::GreaterEqual, 3);
  const std::vector<double> x{1, 5};
  std::mt19937_64 rng(1);
  auto s = lns(inst, evaluate(inst, x), 0.0, rng, sub_mip_budget(Deadline::never()));
  ASSERT_TRUE(s);
  EXPECT_EQ(s->values[0], 1.0);
  EXPECT_NEAR(s->values[1], 2.0, 1e-9);
}

TEST(Lns, ReturnsStrictImprovements) {
  std::mt19937_64 rng(600);
  int improved = 0;
  for (int t = 0; t < 200; ++t) {
    ProblemInstance inst = testing::random_integer_milp(rng);
    auto seed = random_feasible(inst, rng);
    if (!seed) continue;
    auto s = lns(inst, *seed, 0.3, rng, sub_mip_budget(Deadline::never()));
    if (!s) continue;
    ++improved;
    EXPECT_LT(s->objective, seed->objective);
    EXPECT_TRUE(evaluate(inst, s->values).feasible());
  }
  EXPECT_GT(improved, 10);
}

TEST(Rins, IdenticalPointsFixEverything) {
  ProblemInstance inst = knapsack();
  const std::vector<double> x{0, 0, 1};
  EXPECT_FALSE(rins(inst, evaluate(inst, x), x, sub_mip_budget(Deadline::never())));
}

TEST(Rins, NoAgreementSolvesWithCutoff) {
  ProblemInstance inst = knapsack();
  const std::vector<double> x{0, 0, 1};
  const std::vector<double> lp{0.5, 0.5, 0.5};
  auto s = rins(inst, evaluate(inst, x), lp, sub_mip_budget(Deadline::never()));
  ASSERT_TRUE(s);
  EXPECT_EQ(s->objective, -16.0);
}

TEST(Rins, ReturnsStrictImprovements) {
  std::mt19937_64 rng(700);
  int improved = 0;
  for (int t = 0; t < 200; ++t) {
    ProblemInstance inst = testing::random_integer_milp(rng);
    auto seed = random_feasible(inst, rng);
    if (!seed) continue;
    LpResult root = solve_lp(LpRelaxation{&inst, {}, std::nullopt});
    auto s = rins(inst, *seed, root.point, sub_mip_budget(Deadline::never()));
    if (!s) continue;
    ++improved;
    EXPECT_LT(s->objective, seed->objective);
    EXPECT_TRUE(evaluate(inst, s->values).feasible());
  }
  EXPECT_GT(improved, 10);
}

TEST(SubMipBudget, TenPercentOrThousandNodes) {
  const Deadline parent = Deadline::after(100.0);
  BnbBudget b = sub_mip_budget(parent);
  EXPECT_EQ(b.node_cap, 1000);
  EXPECT_NEAR(b.deadline.remaining_seconds(), 10.0, 0.5);
  EXPECT_FALSE(sub_mip_budget(Deadline::never()).deadline.bounded());
}

}  // namespace
}  // namespace poutine
