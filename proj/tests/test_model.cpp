// SPDX-FileCopyrightText: Copyright (c) 2026 The Poutine Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <random>

#include "oracles.hpp"
#include "poutine/model.hpp"

namespace poutine {
namespace {

const std::filesystem::path kData = POUTINE_DATA_DIR;

ProblemInstance two_binaries() {
  ProblemInstance inst;
  inst.name = "tiny";
  inst.add_variable("x1", VarClass::Binary, 0, 1, 1.0);
  inst.add_variable("x2", VarClass::Binary, 0, 1, 1.0);
  inst.add_row("c1", {{0, 1.0}, {1, 1.0}}, RowSense::GreaterEqual, 1.0);
  return inst;
}

TEST(Evaluate, FeasiblePoint) {
  const std::vector<double> x{1, 0};
  Solution s = evaluate(two_binaries(), x);
  EXPECT_DOUBLE_EQ(s.objective, 1.0);
  EXPECT_DOUBLE_EQ(s.max_violation, 0.0);
  EXPECT_TRUE(s.feasible());
}

TEST(Evaluate, RowSlackDominatesIntegrality) {
  const std::vector<double> x{0.4, 0};
  Solution s = evaluate(two_binaries(), x);
  EXPECT_NEAR(s.max_violation, 0.6, 1e-12);
}

TEST(Evaluate, IntegralityGap) {
  const std::vector<double> x{0.5, 0.5};
  Solution s = evaluate(two_binaries(), x);
  EXPECT_DOUBLE_EQ(s.objective, 1.0);
  EXPECT_DOUBLE_EQ(s.max_violation, 0.5);
}

TEST(Evaluate, LengthMismatchThrows) {
  const std::vector<double> x{1};
  EXPECT_THROW(evaluate(two_binaries(), x), ModelError);
}

TEST(Evaluate, AddsObjectiveConstant) {
  ProblemInstance inst = two_binaries();
  inst.objective_constant = 2.5;
  const std::vector<double> x{1, 1};
  EXPECT_DOUBLE_EQ(evaluate(inst, x).objective, 4.5);
}

TEST(Evaluate, IsPure) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 50; ++t) {
    ProblemInstance inst = testing::random_integer_milp(rng);
    std::vector<double> x(inst.num_vars());
    std::uniform_real_distribution<double> u(-3, 3);
    for (double& v : x) v = u(rng);
    Solution a = evaluate(inst, x);
    Solution b = evaluate(inst, x);
    EXPECT_EQ(std::memcmp(&a.objective, &b.objective, sizeof(double)), 0);
    EXPECT_EQ(std::memcmp(&a.max_violation, &b.max_violation, sizeof(double)), 0);
  }
}

TEST(WriteSol, MiplibFormat) {
  const std::vector<double> x{1, 0};
  ProblemInstance inst = two_binaries();
  EXPECT_EQ(write_sol(evaluate(inst, x), inst), "=obj= 1\nx1 1\nx2 0\n");
}

TEST(WriteSol, RoundTripOnRandomInstances) {
  std::mt19937_64 rng(11);
  int checked = 0;
  for (int t = 0; t < 100; ++t) {
    ProblemInstance inst = testing::random_integer_milp(rng);
    const testing::BruteForce bf = testing::brute_force(inst);
    if (!bf.feasible) continue;
    std::vector<double> x(bf.argmin.begin(), bf.argmin.end());
    Solution s = evaluate(inst, x);
    Solution back = evaluate(inst, parse_sol(write_sol(s, inst), inst));
    EXPECT_LE(back.max_violation, 1e-6);
    EXPECT_NEAR(back.objective, s.objective, 1e-9 * std::max(1.0, std::abs(s.objective)));
    ++checked;
  }
  EXPECT_GT(checked, 50);
}

TEST(WriteSol, ContinuousValuesRoundTripExactly) {
  ProblemInstance inst;
  inst.add_variable("y", VarClass::Continuous, -kInf, kInf, 1.0 / 3.0);
  const std::vector<double> x{0.1 + 0.2};
  Solution s = evaluate(inst, x);
  EXPECT_EQ(parse_sol(write_sol(s, inst), inst)[0], x[0]);
}

constexpr const char* kMinimal = R"(NAME          TINY
ROWS
 N  obj
 G  c1
COLUMNS
    MARKER                 'MARKER'                 'INTORG'
    x         obj               1   c1                 1
    y         obj               1   c1                 1
    MARKER                 'MARKER'                 'INTEND'
RHS
    RHS       c1                1
ENDATA
)";

TEST(ParseMps, MinimalBinaryFile) {
  ProblemInstance inst = parse_mps(kMinimal);
  EXPECT_EQ(inst.num_vars(), 2);
  ASSERT_EQ(inst.num_rows(), 1);
  EXPECT_EQ(inst.rows[0].sense, RowSense::GreaterEqual);
  EXPECT_EQ(inst.var_class, (std::vector<VarClass>{VarClass::Binary, VarClass::Binary}));
  EXPECT_EQ(inst.upper, (std::vector<double>{1, 1}));
}

TEST(ParseMps, UiBoundGivesGeneralInteger) {
  ProblemInstance inst = parse_mps(R"(NAME UI
ROWS
 N obj
 L c
COLUMNS
    MARKER 'MARKER' 'INTORG'
    x obj 1 c 1
    MARKER 'MARKER' 'INTEND'
RHS
    RHS c 4
BOUNDS
 UI BND x 10
ENDATA
)");
  EXPECT_EQ(inst.upper[0], 10.0);
  EXPECT_EQ(inst.lower[0], 0.0);
  EXPECT_EQ(inst.var_class[0], VarClass::GeneralInteger);
}

TEST(ParseMps, FractionalIntegerBoundsTighten) {
  ProblemInstance inst = parse_mps(R"(NAME T
ROWS
 N obj
COLUMNS
    MARKER 'MARKER' 'INTORG'
    x obj 1
    MARKER 'MARKER' 'INTEND'
BOUNDS
 LO BND x -1.5
 UP BND x 2.7
ENDATA
)");
  EXPECT_EQ(inst.lower[0], -1.0);
  EXPECT_EQ(inst.upper[0], 2.0);
}

TEST(ParseMps, ExplicitZeroOneBoundsStayBinary) {
  ProblemInstance inst = parse_mps(R"(NAME T
ROWS
 N obj
COLUMNS
    MARKER 'MARKER' 'INTORG'
    x obj 1
    MARKER 'MARKER' 'INTEND'
BOUNDS
 UP BND x 1
ENDATA
)");
  EXPECT_EQ(inst.var_class[0], VarClass::Binary);
}

std::string ranged(const std::string& type, double rhs, double range) {
  return "NAME R\nROWS\n N obj\n " + type + " r\nCOLUMNS\n    x obj 1 r 1\nRHS\n    RHS r " +
         std::to_string(rhs) + "\nRANGES\n    RNG r " + std::to_string(range) +
         "\nBOUNDS\n FR BND x\nENDATA\n";
}

// Interval [lo, hi] implied by the rows of a one-column instance.
std::pair<double, double> implied(const ProblemInstance& inst) {
  double lo = -kInf;
  double hi = kInf;
  for (const Row& row : inst.rows) {
    if (row.sense != RowSense::GreaterEqual) hi = std::min(hi, row.rhs);
    if (row.sense != RowSense::LessEqual) lo = std::max(lo, row.rhs);
  }
  return {lo, hi};
}

TEST(ParseMps, RangesOnEqualityRow) {
  EXPECT_EQ(implied(parse_mps(ranged("E", 3, 2))), std::make_pair(3.0, 5.0));
  EXPECT_EQ(implied(parse_mps(ranged("E", 3, -2))), std::make_pair(1.0, 3.0));
}

TEST(ParseMps, RangesOnInequalityRows) {
  EXPECT_EQ(implied(parse_mps(ranged("L", 3, -2))), std::make_pair(1.0, 3.0));
  EXPECT_EQ(implied(parse_mps(ranged("G", 3, -2))), std::make_pair(3.0, 5.0));
  EXPECT_EQ(parse_mps(ranged("L", 3, 2)).num_rows(), 2);
}

TEST(ParseMps, MaxIsNegated) {
  ProblemInstance inst = read_mps_file(kData / "knapsack.mps");
  EXPECT_EQ(inst.objective, (std::vector<double>{-10, -6, -4}));
}

TEST(ParseMps, ObjectiveRhsIsNegatedConstant) {
  ProblemInstance inst = read_mps_file(kData / "mixed.mps");
  EXPECT_DOUBLE_EQ(inst.objective_constant, 2.5);
}

struct ErrorCase {
  const char* text;
  int line;
};

TEST(ParseMps, ErrorsNameTheLine) {
  const ErrorCase cases[] = {
      {"NAME X\nCOLUMNS\n    x obj 1\nROWS\n N obj\nENDATA\n", 3},
      {"NAME X\nROWS\n N obj\n L c\nCOLUMNS\n    x obj 1 d 1\nENDATA\n", 6},
      {"NAME X\nROWS\n N obj\n N obj2\nENDATA\n", 4},
      {"NAME X\nROWS\n N obj\nCOLUMNS\n    x obj 1\nSOS\nENDATA\n", 6},
      {"NAME X\nROWS\n N obj\nCOLUMNS\n    x obj 1\nBOUNDS\n SC BND x 3\nENDATA\n", 7},
      {"NAME X\nROWS\n N obj\nCOLUMNS\n    x obj 1\n", 6},
  };
  for (const ErrorCase& c : cases) {
    try {
      parse_mps(c.text);
      ADD_FAILURE() << "accepted:\n" << c.text;
    } catch (const MpsParseError& e) {
      EXPECT_EQ(e.line(), c.line) << e.what();
    }
  }
}

TEST(ParseMps, GzipMatchesPlain) {
  ProblemInstance plain = read_mps_file(kData / "assign3.mps");
  ProblemInstance packed = read_mps_file(kData / "assign3.mps.gz");
  EXPECT_EQ(plain.objective, packed.objective);
  EXPECT_EQ(plain.num_rows(), packed.num_rows());
}

struct Counts {
  const char* file;
  InstanceStats expected;
};

TEST(ParseMps, MiniCorpusHandCounts) {
  const Counts corpus[] = {
      {"knapsack.mps", {3, 1, 3, 0, 0}},
      {"assign3.mps", {9, 6, 9, 0, 0}},
      {"assign3.mps.gz", {9, 6, 9, 0, 0}},
      {"mixed.mps", {6, 5, 1, 2, 3}},
      {"free_cover.mps", {4, 4, 4, 0, 0}},
  };
  for (const Counts& c : corpus) {
    InstanceStats s = stats(read_mps_file(kData / c.file));
    EXPECT_EQ(s.vars, c.expected.vars) << c.file;
    EXPECT_EQ(s.rows, c.expected.rows) << c.file;
    EXPECT_EQ(s.binaries, c.expected.binaries) << c.file;
    EXPECT_EQ(s.general_integers, c.expected.general_integers) << c.file;
    EXPECT_EQ(s.continuous, c.expected.continuous) << c.file;
  }
}

TEST(ParseMps, MixedBounds) {
  ProblemInstance inst = read_mps_file(kData / "mixed.mps");
  EXPECT_EQ(inst.lower, (std::vector<double>{0, 0, -2, 0, -kInf, -kInf}));
  EXPECT_EQ(inst.upper, (std::vector<double>{1, 10, 3, 5, kInf, 20}));
}

}  // namespace
}  // namespace poutine
