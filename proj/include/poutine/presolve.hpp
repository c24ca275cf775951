// SPDX-FileCopyrightText: Copyright (c) 2026 The Poutine Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <variant>
#include <vector>

#include "poutine/model.hpp"

namespace poutine {

// Indices in every reduction refer to the original instance.
struct FixedVariable {
  int index;
  double value;
};

struct RemovedRow {
  int index;
};

enum class BoundSide : std::uint8_t { Lower, Upper };

struct TightenedBound {
  int index;
  BoundSide side;
  double old_value;
  double new_value;
};

using Reduction = std::variant<FixedVariable, RemovedRow, TightenedBound>;

struct PresolveRecord {
  std::vector<Reduction> reductions;
  std::vector<int> column_map;  // reduced column -> original column
  std::vector<int> row_map;     // reduced row -> original row
  int original_vars = 0;
  int original_rows = 0;
};

class ProvenInfeasible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PresolveResult {
  ProblemInstance reduced;
  PresolveRecord record;
};

inline constexpr int kMaxPresolvePasses = 10;

/// Removes fixed columns, empty rows and singleton rows (turned into bounds),
/// rounding integer bounds inward. Repeats until nothing changes or the pass
/// cap is hit. Throws ProvenInfeasible on an empty row that cannot hold or a
/// column whose bounds cross.
PresolveResult presolve(const ProblemInstance& instance);

/// Record that maps every column and row onto itself.
PresolveRecord identity_record(const ProblemInstance& instance);

/// Maps a reduced-space solution back to the original columns and evaluates it
/// there.
Solution uncrush(const Solution& reduced, const PresolveRecord& record,
                 const ProblemInstance& original);

}  // namespace poutine
