// SPDX-FileCopyrightText: Copyright (c) 2026 The Poutine Authors
// SPDX-License-Identifier: Apache-2.0

#include "poutine/rlb.hpp"

#include <algorithm>
#include <cmath>

#include "poutine/bnb.hpp"

namespace poutine {

namespace {

constexpr double kBigMScale = 1.1;
constexpr double kMinBigM = 1.0;

}  // namespace

std::vector<double> clamp_seed(const ProblemInstance& instance, std::span<const double> seed) {
  std::vector<double> out(seed.begin(), seed.end());
  for (int j = 0; j < instance.num_vars(); ++j) {
    if (instance.is_integer(j)) out[j] = std::floor(out[j] + 0.5);
    out[j] = std::clamp(out[j], instance.lower[j], instance.upper[j]);
  }
  return out;
}

RepairModel build_repair_model(const ProblemInstance& instance, std::span<const double> x_hat) {
  if (static_cast<int>(x_hat.size()) != instance.num_vars()) {
    throw ModelError("repair seed has the wrong length");
  }
  RepairModel rm;
  rm.original_vars = instance.num_vars();
  rm.model = instance;
  ProblemInstance& model = rm.model;
  std::fill(model.objective.begin(), model.objective.end(), 0.0);
  model.objective_constant = 0.0;
  rm.seed_point = clamp_seed(instance, x_hat);

  for (int i = 0; i < instance.num_rows(); ++i) {
    const Row& row = instance.rows[i];
    const double activity = row_activity(row, rm.seed_point);
    const double violation = row_violation(row, activity);
    if (violation <= kFeasTol) continue;
    const double big_m = std::max(kMinBigM, kBigMScale * violation);
    const std::string& name = row.name;
    RepairSlack rs{i, -1, -1, big_m};
    double slack_value = violation;
    switch (row.sense) {
      case RowSense::LessEqual:
        rs.slack = model.add_variable("rlb_s_" + name, VarClass::Continuous, 0.0, big_m);
        model.rows[i].entries.push_back(Entry{rs.slack, -1.0});
        break;
      case RowSense::GreaterEqual:
        rs.slack = model.add_variable("rlb_s_" + name, VarClass::Continuous, 0.0, big_m);
        model.rows[i].entries.push_back(Entry{rs.slack, 1.0});
        break;
      case RowSense::Equal:
        rs.slack = model.add_variable("rlb_s_" + name, VarClass::Continuous, -big_m, big_m);
        model.rows[i].entries.push_back(Entry{rs.slack, -1.0});
        slack_value = activity - row.rhs;
        break;
    }
    rs.flag = model.add_variable("rlb_y_" + name, VarClass::Binary, 0.0, 1.0, 1.0);
    model.add_row("rlb_link_" + name, {{rs.slack, 1.0}, {rs.flag, -big_m}}, RowSense::LessEqual, 0.0);
    if (row.sense == RowSense::Equal) {
      model.add_row("rlb_link_neg_" + name, {{rs.slack, -1.0}, {rs.flag, -big_m}},
                    RowSense::LessEqual, 0.0);
    }
    rm.seed_point.push_back(slack_value);
    rm.seed_point.push_back(1.0);
    rm.slacks.push_back(rs);
  }
  return rm;
}

std::vector<double> project(const RepairModel& repair, std::span<const double> point) {
  return {point.begin(), point.begin() + repair.original_vars};
}

std::optional<Solution> run_rlb(const ProblemInstance& instance, std::span<const double> seed_point,
                                int k, const Deadline& deadline) {
  const RepairModel repair = build_repair_model(instance, seed_point);
  if (repair.slacks.empty()) {
    Solution s = evaluate(instance, repair.seed_point);
    if (s.feasible()) return s;
    return std::nullopt;
  }

  Solution current = evaluate(repair.model, repair.seed_point);
  int radius = std::max(1, k);
  bool widened = false;
  while (current.objective > 0.5 && !deadline.expired()) {
    if (auto better = local_branching(repair.model, current, radius, sub_mip_budget(deadline))) {
      current = std::move(*better);
      continue;
    }
    if (widened) break;
    radius *= 2;
    widened = true;
  }
  if (current.objective > 0.5) return std::nullopt;
  Solution s = polish_and_evaluate(instance, project(repair, current.values));
  if (s.feasible()) return s;
  return std::nullopt;
}

}  // namespace poutine
