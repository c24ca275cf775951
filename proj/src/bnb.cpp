// SPDX-FileCopyrightText: Copyright (c) 2026 The Poutine Authors
// SPDX-License-Identifier: Apache-2.0

#include "poutine/bnb.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <queue>
#include <set>

namespace poutine {

const char* to_string(BnbStatus status) {
  switch (status) {
    case BnbStatus::Optimal: return "optimal";
    case BnbStatus::Infeasible: return "infeasible";
    case BnbStatus::BudgetExhausted: return "budget-exhausted";
    case BnbStatus::Unbounded: return "unbounded";
  }
  return "?";
}

namespace {

constexpr double kPruneTol = 1e-9;
constexpr double kImproveTol = 1e-6;
constexpr double kAgreeTol = 1e-6;
constexpr long kSubMipNodes = 1000;
constexpr double kSubMipTimeShare = 0.1;
constexpr int kLnsStallRounds = 5;

std::pair<double, double> node_bounds(const SearchNode& node, const ProblemInstance& instance, int j) {
  for (const BoundOverride& o : node.overrides) {
    if (o.index == j) return {o.lower, o.upper};
  }
  return {instance.lower[j], instance.upper[j]};
}

SearchNode child_with(const SearchNode& node, int j, double lo, double hi, long id) {
  SearchNode child;
  child.overrides = node.overrides;
  auto it = std::find_if(child.overrides.begin(), child.overrides.end(),
                         [j](const BoundOverride& o) { return o.index == j; });
  if (it != child.overrides.end()) {
    it->lower = lo;
    it->upper = hi;
  } else {
    child.overrides.push_back(BoundOverride{j, lo, hi});
  }
  child.depth = node.depth + 1;
  child.creation = id;
  return child;
}

// Open nodes, FIFO until the cap is crossed, then lowest bound first.
class NodeQueue {
 public:
  explicit NodeQueue(std::size_t cap) : cap_(cap) {}

  bool empty() const { return fifo_.empty() && heap_.empty(); }
  std::size_t size() const { return fifo_.size() + heap_.size(); }

  void push(SearchNode node) {
    bounds_.insert(node.parent_bound);
    if (best_first_) {
      heap_.push_back(std::move(node));
      std::push_heap(heap_.begin(), heap_.end(), worse);
      return;
    }
    fifo_.push_back(std::move(node));
    if (fifo_.size() > cap_) {
      best_first_ = true;
      for (auto& n : fifo_) heap_.push_back(std::move(n));
      fifo_.clear();
      std::make_heap(heap_.begin(), heap_.end(), worse);
    }
  }

  SearchNode pop() {
    SearchNode node;
    if (!fifo_.empty()) {
      node = std::move(fifo_.front());
      fifo_.pop_front();
    } else {
      std::pop_heap(heap_.begin(), heap_.end(), worse);
      node = std::move(heap_.back());
      heap_.pop_back();
    }
    bounds_.erase(bounds_.find(node.parent_bound));
    return node;
  }

  double min_bound() const { return bounds_.empty() ? kInf : *bounds_.begin(); }

 private:
  static bool worse(const SearchNode& a, const SearchNode& b) {
    if (a.parent_bound != b.parent_bound) return a.parent_bound > b.parent_bound;
    return a.creation > b.creation;
  }

  std::size_t cap_;
  bool best_first_ = false;
  std::deque<SearchNode> fifo_;
  std::vector<SearchNode> heap_;
  std::multiset<double> bounds_;
};

bool has_binary(const ProblemInstance& instance) {
  return std::any_of(instance.var_class.begin(), instance.var_class.end(),
                     [](VarClass c) { return c == VarClass::Binary; });
}

// Copy of `instance` with the given integer columns fixed to `values`.
ProblemInstance with_fixings(const ProblemInstance& instance, std::span<const int> columns,
                             std::span<const double> values) {
  ProblemInstance sub = instance;
  for (int j : columns) {
    const double v = std::clamp(std::round(values[j]), instance.lower[j], instance.upper[j]);
    sub.lower[j] = v;
    sub.upper[j] = v;
  }
  return sub;
}

BnbOptions sub_mip_options(double cutoff) {
  BnbOptions opts;
  opts.local_search = false;
  opts.cutoff = cutoff;
  return opts;
}

// Solves a sub-MIP whose columns match `instance`; returns a solution that is
// feasible for `instance` itself.
std::optional<Solution> solve_sub_mip(const ProblemInstance& instance, const ProblemInstance& sub,
                                      double cutoff, const BnbBudget& budget, long* nodes_used = nullptr) {
  BnbResult r = solve_bnb(sub, nullptr, budget, {}, sub_mip_options(cutoff));
  if (nodes_used != nullptr) *nodes_used = r.nodes;
  if (!r.best) return std::nullopt;
  Solution s = evaluate(instance, r.best->values);
  if (!s.feasible() || s.objective >= cutoff) return std::nullopt;
  return s;
}

class BranchAndBound {
 public:
  BranchAndBound(const ProblemInstance& inst, const BnbBudget& budget, const IncumbentSink& sink,
                 const BnbOptions& opts)
      : inst_(inst), budget_(budget), sink_(sink), opts_(opts), queue_(opts.queue_cap), rng_(opts.seed) {
    upper_ = opts.cutoff;
  }

  BnbResult run(const Solution* warm) {
    if (warm != nullptr && warm->feasible() && warm->objective < upper_) {
      best_ = *warm;
      upper_ = warm->objective;
    }
    SearchNode root;
    root.creation = next_id_++;
    queue_.push(std::move(root));

    BnbResult result;
    bool exhausted = false;
    while (!queue_.empty()) {
      if (nodes_ >= budget_.node_cap || budget_.deadline.expired() || gap_closed()) {
        exhausted = true;
        break;
      }
      SearchNode node = queue_.pop();
      if (node.parent_bound >= upper_ - kPruneTol) continue;
      ++nodes_;
      if (opts_.on_node) opts_.on_node(node.creation);
      if (!process(node)) {
        result.status = BnbStatus::Unbounded;
        result.best = best_;
        result.nodes = nodes_;
        result.lower_bound = -kInf;
        return result;
      }
      if (opts_.progress) opts_.progress(lower_bound(), upper_);
    }
    result.nodes = nodes_;
    result.best = best_;
    result.lower_bound = lower_bound();
    if (exhausted || incomplete_) {
      result.status = (gap_closed() && !incomplete_) ? BnbStatus::Optimal : BnbStatus::BudgetExhausted;
    } else {
      result.status = best_ ? BnbStatus::Optimal : BnbStatus::Infeasible;
    }
    return result;
  }

 private:
  double lower_bound() const {
    double lb = std::min({queue_.min_bound(), lost_bound_, upper_});
    return lb;
  }

  bool gap_closed() const {
    if (!budget_.gap_tolerance || !best_) return false;
    const double lb = lower_bound();
    return upper_ - lb <= *budget_.gap_tolerance * std::max(1.0, std::abs(upper_));
  }

  // False only when the root relaxation is unbounded.
  bool process(SearchNode& node) {
    LpRelaxation rel{&inst_, node.overrides, std::nullopt};
    LpResult lp = solve_lp(rel, node.basis.empty() ? nullptr : &node.basis, kDefaultIterationCap,
                           budget_.deadline);
    const bool is_root = nodes_ == 1;
    switch (lp.status) {
      case LpStatus::Infeasible: return true;
      case LpStatus::Unbounded:
        if (is_root) return false;
        [[fallthrough]];
      case LpStatus::IterationLimit:
        incomplete_ = true;
        lost_bound_ = std::min(lost_bound_, node.parent_bound);
        return true;
      case LpStatus::Optimal: break;
    }
    const double bound = std::max(lp.objective, node.parent_bound);
    if (bound < upper_ - kPruneTol) {
      const int j = select_branching_variable(lp.point, inst_);
      if (j < 0) {
        Solution cand = polish_and_evaluate(inst_, lp.point);
        if (cand.feasible()) {
          accept(cand);
        } else {
          incomplete_ = true;
          lost_bound_ = std::min(lost_bound_, bound);
        }
      } else {
        node.parent_bound = bound;
        auto [down, up] = branch(node, lp.point, inst_, next_id_);
        down.basis = lp.basis;
        up.basis = std::move(lp.basis);
        queue_.push(std::move(down));
        queue_.push(std::move(up));
      }
    }
    if (!opts_.local_search || !best_) return true;
    if (is_root && has_binary(inst_)) {
      if (auto s = local_branching(inst_, *best_, opts_.lb_radius, sub_mip_budget(budget_.deadline))) accept(*s);
    }
    if (opts_.heuristic_period > 0 && nodes_ % opts_.heuristic_period == 0) {
      const long round = nodes_ / opts_.heuristic_period;
      if (round % 2 == 1) {
        if (auto s = lns(inst_, *best_, opts_.lns_destroy_fraction, rng_, sub_mip_budget(budget_.deadline))) accept(*s);
      } else {
        if (auto s = rins(inst_, *best_, lp.point, sub_mip_budget(budget_.deadline))) accept(*s);
      }
    }
    return true;
  }

  void accept(const Solution& cand) {
    if (cand.objective >= upper_ - kPruneTol) return;
    best_ = cand;
    upper_ = cand.objective;
    if (sink_) sink_(cand);
  }

  const ProblemInstance& inst_;
  const BnbBudget& budget_;
  const IncumbentSink& sink_;
  const BnbOptions& opts_;
  NodeQueue queue_;
  std::mt19937_64 rng_;
  std::optional<Solution> best_;
  double upper_ = kInf;
  double lost_bound_ = kInf;
  bool incomplete_ = false;
  long nodes_ = 0;
  long next_id_ = 0;
};

}  // namespace

BnbResult solve_bnb(const ProblemInstance& instance, const Solution* warm_incumbent,
                    const BnbBudget& budget, const IncumbentSink& sink, const BnbOptions& options) {
  return BranchAndBound(instance, budget, sink, options).run(warm_incumbent);
}

int select_branching_variable(std::span<const double> lp_point, const ProblemInstance& instance) {
  int best = -1;
  double best_frac = kFeasTol;
  for (int j = 0; j < instance.num_vars(); ++j) {
    if (!instance.is_integer(j)) continue;
    const double f = fractionality(lp_point[j]);
    if (f > best_frac) {
      best = j;
      best_frac = f;
    }
  }
  return best;
}

std::pair<SearchNode, SearchNode> branch(const SearchNode& node, std::span<const double> lp_point,
                                         const ProblemInstance& instance, long& next_id) {
  const int j = select_branching_variable(lp_point, instance);
  const auto [lo, hi] = node_bounds(node, instance, j);
  SearchNode down = child_with(node, j, lo, std::floor(lp_point[j]), next_id++);
  SearchNode up = child_with(node, j, std::ceil(lp_point[j]), hi, next_id++);
  down.parent_bound = node.parent_bound;
  up.parent_bound = node.parent_bound;
  return {std::move(down), std::move(up)};
}

Row local_branching_row(const ProblemInstance& instance, std::span<const double> center, int k) {
  Row row;
  row.name = "local_branching";
  row.sense = RowSense::LessEqual;
  int support = 0;
  for (int j = 0; j < instance.num_vars(); ++j) {
    if (instance.var_class[j] != VarClass::Binary) continue;
    if (center[j] > 0.5) {
      row.entries.push_back(Entry{j, -1.0});
      ++support;
    } else {
      row.entries.push_back(Entry{j, 1.0});
    }
  }
  row.rhs = static_cast<double>(k - support);
  return row;
}

ProblemInstance with_local_branching_row(const ProblemInstance& instance,
                                         std::span<const double> center, int k) {
  ProblemInstance sub = instance;
  const auto binaries = std::count(instance.var_class.begin(), instance.var_class.end(), VarClass::Binary);
  if (k < binaries) sub.rows.push_back(local_branching_row(instance, center, k));
  return sub;
}

BnbBudget sub_mip_budget(const Deadline& parent) {
  BnbBudget b;
  b.node_cap = kSubMipNodes;
  b.deadline = parent.fraction_of_remaining(kSubMipTimeShare);
  return b;
}

std::optional<Solution> local_branching(const ProblemInstance& instance, const Solution& incumbent,
                                        int k, const BnbBudget& sub_budget) {
  const ProblemInstance sub = with_local_branching_row(instance, incumbent.values, k);
  return solve_sub_mip(instance, sub, incumbent.objective - kImproveTol, sub_budget);
}

std::optional<Solution> lns(const ProblemInstance& instance, const Solution& incumbent,
                            double destroy_fraction, std::mt19937_64& rng,
                            const BnbBudget& sub_budget) {
  std::vector<int> integers;
  for (int j = 0; j < instance.num_vars(); ++j) {
    if (instance.is_integer(j)) integers.push_back(j);
  }
  const double keep_share = 1.0 - std::clamp(destroy_fraction, 0.0, 1.0);
  const auto keep = static_cast<std::size_t>(std::llround(keep_share * static_cast<double>(integers.size())));
  // Neighborhoods that ignore the random draw need only one round.
  const bool single_round = keep == 0 || keep == integers.size();

  std::optional<Solution> best;
  const Solution* current = &incumbent;
  long nodes_left = sub_budget.node_cap;
  int stall = 0;
  while (nodes_left > 0 && !sub_budget.deadline.expired() && stall < kLnsStallRounds) {
    std::shuffle(integers.begin(), integers.end(), rng);
    std::vector<int> fixed(integers.begin(), integers.begin() + static_cast<long>(keep));
    std::sort(fixed.begin(), fixed.end());
    const ProblemInstance sub = with_fixings(instance, fixed, current->values);
    BnbBudget round_budget = sub_budget;
    round_budget.node_cap = nodes_left;
    long used = 0;
    auto found = solve_sub_mip(instance, sub, current->objective - kImproveTol, round_budget, &used);
    nodes_left -= std::max(1L, used);
    if (found) {
      best = std::move(found);
      current = &*best;
      stall = 0;
    } else {
      ++stall;
    }
    if (single_round) break;
  }
  return best;
}

std::optional<Solution> rins(const ProblemInstance& instance, const Solution& incumbent,
                             std::span<const double> node_lp_point, const BnbBudget& sub_budget) {
  std::vector<int> agree;
  for (int j = 0; j < instance.num_vars(); ++j) {
    if (instance.is_integer(j) && std::abs(incumbent.values[j] - node_lp_point[j]) <= kAgreeTol) {
      agree.push_back(j);
    }
  }
  const double cutoff =
      incumbent.objective - std::max(kImproveTol, 1e-4 * std::abs(incumbent.objective));
  const ProblemInstance sub = with_fixings(instance, agree, incumbent.values);
  return solve_sub_mip(instance, sub, cutoff, sub_budget);
}

}  // namespace poutine
