// SPDX-FileCopyrightText: Copyright (c) 2026 The Poutine Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "poutine/deadline.hpp"
#include "poutine/model.hpp"

namespace poutine {

enum class LpStatus : std::uint8_t { Optimal, Infeasible, Unbounded, IterationLimit };

const char* to_string(LpStatus status);

/// Replaces both bounds of one column.
struct BoundOverride {
  int index;
  double lower;
  double upper;
};

struct ObjectiveOverride {
  std::vector<double> coefficients;
  double constant = 0.0;
};

/// The continuous relaxation of an instance, optionally with tightened bounds
/// and a replacement objective. Integrality is always dropped.
struct LpRelaxation {
  const ProblemInstance* instance = nullptr;
  std::vector<BoundOverride> bound_overrides;
  std::optional<ObjectiveOverride> objective_override;
};

enum class BasisStatus : std::uint8_t { Basic, AtLower, AtUpper, Free };

/// Status of every structural column followed by every row slack.
struct Basis {
  std::vector<BasisStatus> status;

  bool empty() const { return status.empty(); }
};

struct LpResult {
  LpStatus status = LpStatus::IterationLimit;
  std::vector<double> point;
  double objective = kInf;
  long iterations = 0;
  Basis basis;
};

inline constexpr long kDefaultIterationCap = 200000;

/// Bounded-variable primal simplex over a dense basis inverse.
///
/// Each row i gets a slack s_i = a_i'x whose bounds encode the relation, so
/// the all-slack basis is always available. Phase 1 minimizes the sum of
/// bound violations of basic variables, phase 2 the objective. Pricing is
/// Dantzig; after 5000 degenerate pivots the solve switches to Bland's rule.
/// A compatible `warm_basis` seeds the first basis. Deadline expiry ends the
/// solve with IterationLimit.
LpResult solve_lp(const LpRelaxation& relaxation, const Basis* warm_basis = nullptr,
                  long iteration_cap = kDefaultIterationCap,
                  const Deadline& deadline = Deadline::never());

}  // namespace poutine
