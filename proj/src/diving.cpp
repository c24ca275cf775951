// SPDX-FileCopyrightText: Copyright (c) 2026 The Poutine Authors
// SPDX-License-Identifier: Apache-2.0

#include "poutine/diving.hpp"

#include <algorithm>
#include <cmath>

namespace poutine {

std::optional<Selection> select_variable(std::span<const double> point,
                                         std::span<const VarClass> classes, const DiveRule& rule,
                                         std::mt19937_64& rng) {
  std::vector<int> candidates;
  int chosen = -1;
  double chosen_frac = 0.0;
  for (std::size_t j = 0; j < point.size(); ++j) {
    if (classes[j] == VarClass::Continuous) continue;
    const double f = fractionality(point[j]);
    if (f <= kIntegralityTol) continue;
    const int idx = static_cast<int>(j);
    switch (rule.kind) {
      case DiveKind::Dive1:
        if (chosen < 0 || f < chosen_frac) {
          chosen = idx;
          chosen_frac = f;
        }
        break;
      case DiveKind::Dive2:
        if (chosen < 0 || f > chosen_frac) {
          chosen = idx;
          chosen_frac = f;
        }
        break;
      case DiveKind::Dive3: candidates.push_back(idx); break;
    }
  }
  if (rule.kind == DiveKind::Dive3 && !candidates.empty()) {
    std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
    chosen = candidates[pick(rng)];
  }
  if (chosen < 0) return std::nullopt;
  const double v = point[chosen];
  const Direction dir = v - std::floor(v) <= 0.5 ? Direction::Down : Direction::Up;
  return Selection{chosen, dir};
}

std::vector<double> round_into_bounds(const ProblemInstance& instance, std::span<const double> point) {
  std::vector<double> out(point.begin(), point.end());
  for (int j = 0; j < instance.num_vars(); ++j) {
    if (instance.is_integer(j)) out[j] = std::floor(out[j] + 0.5);
    out[j] = std::clamp(out[j], instance.lower[j], instance.upper[j]);
  }
  return out;
}

namespace {

struct Frame {
  int index;
  Direction taken;
  bool other_open;
  double old_lower;
  double old_upper;
  double value;  // LP value that was bounded
  Basis basis;
};

class Diver {
 public:
  Diver(const ProblemInstance& inst, const DiveRule& rule, const Deadline& deadline)
      : inst_(inst), rule_(rule), deadline_(deadline), rng_(rule.seed), lo_(inst.lower), hi_(inst.upper) {}

  DiveOutcome run(long max_dives) {
    DiveOutcome out;
    LpResult lp = solve(nullptr);
    if (lp.status != LpStatus::Optimal) {
      out.stats = stats_;
      return out;
    }
    record_seed(lp.point, 0);
    std::vector<Frame> stack;
    while (!deadline_.expired()) {
      bool leaf = lp.status != LpStatus::Optimal;
      if (!leaf) {
        const auto sel = select_variable(lp.point, inst_.var_class, rule_, rng_);
        if (!sel) {
          Solution cand = polish_and_evaluate(inst_, lp.point);
          if (cand.feasible()) {
            out.solution = std::move(cand);
            break;
          }
          leaf = true;
        } else {
          const int j = sel->index;
          stack.push_back(Frame{j, sel->direction, true, lo_[j], hi_[j], lp.point[j], lp.basis});
          apply(stack.back(), sel->direction);
          stats_.max_depth = std::max(stats_.max_depth, static_cast<int>(stack.size()));
          const Basis parent = std::move(lp.basis);
          lp = solve(&parent);
          if (lp.status == LpStatus::Optimal) record_seed(lp.point, static_cast<int>(stack.size()));
          continue;
        }
      }
      ++stats_.dives;
      if (stats_.dives >= max_dives) break;
      while (!stack.empty() && !stack.back().other_open) {
        restore(stack.back());
        stack.pop_back();
      }
      if (stack.empty()) break;
      Frame& top = stack.back();
      restore(top);
      top.other_open = false;
      top.taken = top.taken == Direction::Down ? Direction::Up : Direction::Down;
      apply(top, top.taken);
      lp = solve(&top.basis);
      if (lp.status == LpStatus::Optimal) record_seed(lp.point, static_cast<int>(stack.size()));
    }
    out.seed_point = std::move(seed_);
    out.stats = stats_;
    return out;
  }

 private:
  LpResult solve(const Basis* warm) {
    LpRelaxation rel{&inst_, overrides(), std::nullopt};
    ++stats_.lp_solves;
    return solve_lp(rel, warm, kDefaultIterationCap, deadline_);
  }

  std::vector<BoundOverride> overrides() const {
    std::vector<BoundOverride> out;
    for (int j = 0; j < inst_.num_vars(); ++j) {
      if (lo_[j] != inst_.lower[j] || hi_[j] != inst_.upper[j]) out.push_back({j, lo_[j], hi_[j]});
    }
    return out;
  }

  void apply(const Frame& f, Direction dir) {
    if (dir == Direction::Down) {
      hi_[f.index] = std::floor(f.value);
    } else {
      lo_[f.index] = std::ceil(f.value);
    }
  }

  void restore(const Frame& f) {
    lo_[f.index] = f.old_lower;
    hi_[f.index] = f.old_upper;
  }

  void record_seed(const std::vector<double>& point, int depth) {
    if (depth < seed_depth_) return;
    seed_depth_ = depth;
    seed_ = round_into_bounds(inst_, point);
  }

  const ProblemInstance& inst_;
  DiveRule rule_;
  const Deadline& deadline_;
  std::mt19937_64 rng_;
  std::vector<double> lo_, hi_;
  std::vector<double> seed_;
  int seed_depth_ = -1;
  DiveStats stats_;
};

}  // namespace

DiveOutcome run_dive(const ProblemInstance& instance, const DiveRule& rule, long max_dives,
                     const Deadline& deadline) {
  return Diver(instance, rule, deadline).run(std::max(1L, max_dives));
}

}  // namespace poutine
