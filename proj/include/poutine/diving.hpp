// SPDX-FileCopyrightText: Copyright (c) 2026 The Poutine Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "poutine/deadline.hpp"
#include "poutine/lp.hpp"
#include "poutine/model.hpp"

namespace poutine {

enum class DiveKind : std::uint8_t {
  Dive1,  // smallest fractionality
  Dive2,  // largest fractionality
  Dive3,  // uniform random
};

struct DiveRule {
  DiveKind kind = DiveKind::Dive1;
  std::uint64_t seed = 0;  // Dive3 only
};

enum class Direction : std::uint8_t { Down, Up };

struct Selection {
  int index;
  Direction direction;
};

// Integer entries closer than this to an integer count as integral.
inline constexpr double kIntegralityTol = 1e-6;

inline constexpr long kUnlimitedDives = 2147483647L;

/// Picks the fractional integer column to bound next and the side toward its
/// nearest integer (0.5 rounds down). Returns nothing when the point is
/// integral on every integer column.
std::optional<Selection> select_variable(std::span<const double> point,
                                         std::span<const VarClass> classes, const DiveRule& rule,
                                         std::mt19937_64& rng);

struct DiveStats {
  long dives = 0;
  long lp_solves = 0;
  int max_depth = 0;
};

struct DiveOutcome {
  std::optional<Solution> solution;
  /// Deepest LP point reached, rounded on the integer columns. Empty when the
  /// root relaxation failed.
  std::vector<double> seed_point;
  DiveStats stats;
};

/// Depth-first diving with backtracking. Every infeasible leaf counts one
/// dive; the search stops at `max_dives`, the deadline, or when no open branch
/// remains.
DiveOutcome run_dive(const ProblemInstance& instance, const DiveRule& rule,
                     long max_dives = kUnlimitedDives, const Deadline& deadline = Deadline::never());

inline std::optional<Solution> dive(const ProblemInstance& instance, const DiveRule& rule,
                                    long max_dives = kUnlimitedDives,
                                    const Deadline& deadline = Deadline::never()) {
  return run_dive(instance, rule, max_dives, deadline).solution;
}

/// Rounds integer columns half-up and clamps every entry into its bounds.
std::vector<double> round_into_bounds(const ProblemInstance& instance, std::span<const double> point);

}  // namespace poutine
