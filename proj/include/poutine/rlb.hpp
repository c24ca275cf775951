// SPDX-FileCopyrightText: Copyright (c) 2026 The Poutine Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <span>
#include <vector>

#include "poutine/deadline.hpp"
#include "poutine/model.hpp"

namespace poutine {

/// Artificial pair attached to one row the seed violates.
struct RepairSlack {
  int row;
  int slack;  // continuous, |s| <= big_m
  int flag;   // binary, s may be nonzero only when the flag is 1
  double big_m;
};

struct RepairModel {
  ProblemInstance model;  // original columns first, then slack/flag pairs
  std::vector<RepairSlack> slacks;
  int original_vars = 0;
  /// Seed completed with slacks at the seed's violation and every flag at 1;
  /// always feasible for `model`.
  std::vector<double> seed_point;
};

inline constexpr int kDefaultRepairRadius = 10;

/// Integer entries rounded half-up, then every entry clamped into its bounds.
std::vector<double> clamp_seed(const ProblemInstance& instance, std::span<const double> seed);

/// Slacks every row the clamped seed violates and replaces the objective by
/// the number of raised flags. Big-M per row is 1.1 times the seed's
/// violation, at least 1. Throws ModelError on a length mismatch.
RepairModel build_repair_model(const ProblemInstance& instance, std::span<const double> x_hat);

/// First `original_vars` entries of a repair-model point.
std::vector<double> project(const RepairModel& repair, std::span<const double> point);

/// Drives the flag count to zero with local branching around the current
/// repair point. On a stall the radius is doubled once; a second stall ends
/// the search.
std::optional<Solution> run_rlb(const ProblemInstance& instance, std::span<const double> seed_point,
                                int k = kDefaultRepairRadius,
                                const Deadline& deadline = Deadline::never());

}  // namespace poutine
