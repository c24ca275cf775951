// SPDX-FileCopyrightText: Copyright (c) 2026 The Poutine Authors
// SPDX-License-Identifier: Apache-2.0

#include "poutine/fpump.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <stdexcept>

namespace poutine {

void FPConfig::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in [0,1]");
  if (max_iterations < 1) throw std::invalid_argument("nT must be at least 1");
  if (perturb_period < 1) throw std::invalid_argument("FP_T must be at least 1");
}

FpObjective fp_objective(std::span<const double> x_tilde, double alpha,
                         const ProblemInstance& instance) {
  const int n = instance.num_vars();
  if (static_cast<int>(x_tilde.size()) != n) throw std::invalid_argument("x_tilde has the wrong length");
  int integer_count = 0;
  double norm_sq = 0.0;
  for (int j = 0; j < n; ++j) {
    integer_count += instance.is_integer(j);
    norm_sq += instance.objective[j] * instance.objective[j];
  }
  const double norm = std::sqrt(norm_sq);
  const double scale = std::sqrt(static_cast<double>(integer_count)) / (norm + (norm == 0.0 ? 1.0 : 0.0));
  const double w = 1.0 - alpha;

  FpObjective obj;
  obj.coefficients.resize(n);
  for (int j = 0; j < n; ++j) obj.coefficients[j] = alpha * scale * instance.objective[j];
  int next_aux = n;
  for (int j = 0; j < n; ++j) {
    if (!instance.is_integer(j)) continue;
    const double t = x_tilde[j];
    if (t != std::round(t)) throw std::invalid_argument("x_tilde is fractional on an integer column");
    if (instance.var_class[j] == VarClass::Binary) {
      if (t == 0.0) {
        obj.coefficients[j] += w;
      } else {
        obj.coefficients[j] -= w;
        obj.constant += w;
      }
    } else {
      obj.aux.push_back(DistanceAux{j, next_aux++, t});
      obj.coefficients.push_back(w);
    }
  }
  return obj;
}

ProblemInstance distance_model(const ProblemInstance& instance, const FpObjective& objective) {
  ProblemInstance model = instance;
  for (const DistanceAux& a : objective.aux) {
    const int d = model.add_variable("fp_d_" + instance.var_names[a.column], VarClass::Continuous, 0.0, kInf);
    model.add_row("fp_lo_" + instance.var_names[a.column], {{d, 1.0}, {a.column, -1.0}},
                  RowSense::GreaterEqual, -a.target);
    model.add_row("fp_hi_" + instance.var_names[a.column], {{d, 1.0}, {a.column, 1.0}},
                  RowSense::GreaterEqual, a.target);
  }
  model.objective = objective.coefficients;
  model.objective_constant = objective.constant;
  return model;
}

std::vector<double> round_point(std::span<const double> point, std::span<const VarClass> classes) {
  std::vector<double> out(point.begin(), point.end());
  for (std::size_t j = 0; j < out.size(); ++j) {
    if (classes[j] != VarClass::Continuous) out[j] = std::floor(out[j] + 0.5);
  }
  return out;
}

std::vector<double> perturb(std::span<const double> x_tilde, std::span<const double> last_lp_point,
                            const ProblemInstance& instance, std::mt19937_64& rng) {
  std::vector<double> out(x_tilde.begin(), x_tilde.end());
  const int n = instance.num_vars();
  std::vector<int> binaries;
  std::vector<int> generals;
  for (int j = 0; j < n; ++j) {
    if (instance.var_class[j] == VarClass::Binary) binaries.push_back(j);
    if (instance.var_class[j] == VarClass::GeneralInteger) generals.push_back(j);
  }
  const long integers = static_cast<long>(binaries.size() + generals.size());
  if (integers == 0) return out;

  const long t_min = std::max(1L, integers / 10);
  const long t_max = std::max(1L, integers / 2);
  std::uniform_int_distribution<long> draw_t(t_min, t_max);
  const long flips = std::min<long>(draw_t(rng), static_cast<long>(binaries.size()));

  auto gap = [&](int j) { return std::abs(last_lp_point[j] - x_tilde[j]); };
  std::stable_sort(binaries.begin(), binaries.end(), [&](int a, int b) { return gap(a) > gap(b); });
  bool changed = false;
  for (long k = 0; k < flips; ++k) {
    const int j = binaries[k];
    out[j] = 1.0 - out[j];
    changed = true;
  }

  std::uniform_real_distribution<double> coin(0.0, 1.0);
  auto shift = [&](int j, double dir) {
    const double moved = std::clamp(out[j] + dir, instance.lower[j], instance.upper[j]);
    if (moved == out[j]) return false;
    out[j] = moved;
    return true;
  };
  for (int j : generals) {
    const double diff = last_lp_point[j] - x_tilde[j];
    const double p = std::min(1.0, 2.0 * std::abs(diff));
    if (coin(rng) < p && diff != 0.0) changed |= shift(j, diff > 0.0 ? 1.0 : -1.0);
  }
  if (!changed && !generals.empty()) {
    std::stable_sort(generals.begin(), generals.end(), [&](int a, int b) { return gap(a) > gap(b); });
    for (int j : generals) {
      const double diff = last_lp_point[j] - x_tilde[j];
      const double dir = diff < 0.0 ? -1.0 : 1.0;
      if (shift(j, dir) || shift(j, -dir)) break;
    }
  }
  return out;
}

namespace {

bool integral_on_integers(const ProblemInstance& instance, std::span<const double> point) {
  for (int j = 0; j < instance.num_vars(); ++j) {
    if (instance.is_integer(j) && fractionality(point[j]) > kFeasTol) return false;
  }
  return true;
}

// x_tilde on the integer columns, LP values on the continuous ones.
Solution try_rounded(const ProblemInstance& instance, std::span<const double> x_tilde) {
  std::vector<double> cand(x_tilde.begin(), x_tilde.end());
  for (int j = 0; j < instance.num_vars(); ++j) {
    cand[j] = std::clamp(cand[j], instance.lower[j], instance.upper[j]);
  }
  return evaluate(instance, cand);
}

}  // namespace

FPOutcome run_fp(const ProblemInstance& instance, const FPConfig& config, const Deadline& deadline) {
  config.validate();
  FPOutcome out;
  const int n = instance.num_vars();
  std::mt19937_64 rng(config.seed);

  LpResult root = solve_lp(LpRelaxation{&instance, {}, std::nullopt}, nullptr, kDefaultIterationCap, deadline);
  if (root.status != LpStatus::Optimal) return out;
  out.lp_point = root.point;
  out.x_tilde = round_point(root.point, instance.var_class);
  if (integral_on_integers(instance, root.point)) {
    Solution s = polish_and_evaluate(instance, root.point);
    if (s.feasible()) {
      out.solution = std::move(s);
      return out;
    }
  }

  std::deque<std::vector<double>> history{out.x_tilde};
  Basis basis;
  for (long it = 1; it <= config.max_iterations && !deadline.expired(); ++it) {
    out.iterations = it;
    if (Solution s = try_rounded(instance, out.x_tilde); s.feasible()) {
      out.solution = std::move(s);
      return out;
    }
    const FpObjective objective = fp_objective(out.x_tilde, config.alpha, instance);
    LpResult lp;
    if (objective.aux.empty()) {
      ObjectiveOverride ov{objective.coefficients, objective.constant};
      lp = solve_lp(LpRelaxation{&instance, {}, std::move(ov)}, basis.empty() ? nullptr : &basis,
                    kDefaultIterationCap, deadline);
    } else {
      const ProblemInstance model = distance_model(instance, objective);
      lp = solve_lp(LpRelaxation{&model, {}, std::nullopt}, basis.empty() ? nullptr : &basis,
                    kDefaultIterationCap, deadline);
    }
    if (lp.status != LpStatus::Optimal) break;
    basis = std::move(lp.basis);
    out.lp_point.assign(lp.point.begin(), lp.point.begin() + n);
    if (integral_on_integers(instance, out.lp_point)) {
      Solution s = polish_and_evaluate(instance, out.lp_point);
      if (s.feasible()) {
        out.solution = std::move(s);
        return out;
      }
    }
    std::vector<double> next = round_point(out.lp_point, instance.var_class);
    if (std::find(history.begin(), history.end(), next) != history.end()) {
      next = perturb(next, out.lp_point, instance, rng);
    }
    history.push_back(next);
    while (static_cast<long>(history.size()) > config.perturb_period) history.pop_front();
    out.x_tilde = std::move(next);
  }
  if (Solution s = try_rounded(instance, out.x_tilde); s.feasible()) out.solution = std::move(s);
  return out;
}

}  // namespace poutine
