// SPDX-FileCopyrightText: Copyright (c) 2026 The Poutine Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "poutine/deadline.hpp"
#include "poutine/lp.hpp"
#include "poutine/model.hpp"

namespace poutine {

struct BnbBudget {
  long node_cap = std::numeric_limits<long>::max();
  Deadline deadline = Deadline::never();
  std::optional<double> gap_tolerance;  // relative
};

enum class BnbStatus : std::uint8_t { Optimal, Infeasible, BudgetExhausted, Unbounded };

const char* to_string(BnbStatus status);

struct BnbOptions {
  /// Local branching at the root, then LNS and RINS alternating on the cadence.
  bool local_search = true;
  int lb_radius = 10;
  long heuristic_period = 50;
  double lns_destroy_fraction = 0.3;
  std::uint64_t seed = 0;
  /// Only solutions strictly below this value are accepted.
  double cutoff = kInf;
  std::size_t queue_cap = 200000;
  /// Called after every processed node with (best lower bound, incumbent value).
  std::function<void(double, double)> progress;
  /// Called with the creation index of every node that gets an LP solve.
  std::function<void(long)> on_node;
};

struct BnbResult {
  std::optional<Solution> best;
  double lower_bound = -kInf;
  long nodes = 0;
  BnbStatus status = BnbStatus::BudgetExhausted;
};

using IncumbentSink = std::function<void(const Solution&)>;

/// Breadth-first branch-and-bound. Nodes are processed in creation order
/// until the open queue exceeds `queue_cap`, after which the lowest bound is
/// taken first. Every strict improvement of the incumbent goes to `sink`.
BnbResult solve_bnb(const ProblemInstance& instance, const Solution* warm_incumbent,
                    const BnbBudget& budget, const IncumbentSink& sink = {},
                    const BnbOptions& options = {});

struct SearchNode {
  std::vector<BoundOverride> overrides;  // cumulative from the root
  double parent_bound = -kInf;
  int depth = 0;
  long creation = 0;
  Basis basis;  // parent's optimal basis
};

/// Most fractional integer column, ties to the smallest index; -1 if none.
int select_branching_variable(std::span<const double> lp_point, const ProblemInstance& instance);

/// Down child (upper <- floor) and up child (lower <- ceil) on the most
/// fractional column. `next_id` supplies creation indices.
std::pair<SearchNode, SearchNode> branch(const SearchNode& node, std::span<const double> lp_point,
                                         const ProblemInstance& instance, long& next_id);

/// Hamming-ball row over the binaries: sum_{j not in S} x_j + sum_{j in S} (1 - x_j) <= k,
/// stored as sum_{j not in S} x_j - sum_{j in S} x_j <= k - |S|.
Row local_branching_row(const ProblemInstance& instance, std::span<const double> center, int k);

/// The instance plus the local branching row; unchanged when k >= |B|.
ProblemInstance with_local_branching_row(const ProblemInstance& instance,
                                         std::span<const double> center, int k);

/// Budget for a sub-MIP: 10% of the remaining time or 1000 nodes.
BnbBudget sub_mip_budget(const Deadline& parent);

std::optional<Solution> local_branching(const ProblemInstance& instance, const Solution& incumbent,
                                        int k, const BnbBudget& sub_budget);

std::optional<Solution> lns(const ProblemInstance& instance, const Solution& incumbent,
                            double destroy_fraction, std::mt19937_64& rng,
                            const BnbBudget& sub_budget);

std::optional<Solution> rins(const ProblemInstance& instance, const Solution& incumbent,
                             std::span<const double> node_lp_point, const BnbBudget& sub_budget);

}  // namespace poutine
