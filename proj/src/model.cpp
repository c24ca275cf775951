// SPDX-FileCopyrightText: Copyright (c) 2026 The Poutine Authors
// SPDX-License-Identifier: Apache-2.0

#include "poutine/model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace poutine {

int ProblemInstance::add_variable(std::string var_name, VarClass cls, double lo, double hi,
                                  double cost) {
  objective.push_back(cost);
  lower.push_back(lo);
  upper.push_back(hi);
  var_class.push_back(cls);
  var_names.push_back(std::move(var_name));
  return num_vars() - 1;
}

int ProblemInstance::add_row(std::string row_name, std::vector<Entry> entries, RowSense sense,
                             double rhs) {
  rows.push_back(Row{std::move(row_name), std::move(entries), sense, rhs});
  return num_rows() - 1;
}

void ProblemInstance::validate() const {
  const auto n = objective.size();
  if (lower.size() != n || upper.size() != n || var_class.size() != n || var_names.size() != n) {
    throw ModelError("column arrays have inconsistent lengths");
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (std::isnan(lower[j]) || std::isnan(upper[j]) || !std::isfinite(objective[j])) {
      throw ModelError("non-numeric data on column " + var_names[j]);
    }
    if (var_class[j] == VarClass::Binary && (lower[j] < 0.0 || upper[j] > 1.0)) {
      throw ModelError("binary column " + var_names[j] + " has bounds outside [0,1]");
    }
    if (var_class[j] == VarClass::GeneralInteger &&
        ((std::isfinite(lower[j]) && lower[j] != std::ceil(lower[j])) ||
         (std::isfinite(upper[j]) && upper[j] != std::floor(upper[j])))) {
      throw ModelError("integer column " + var_names[j] + " has fractional bounds");
    }
  }
  std::unordered_set<int> seen;
  for (const Row& row : rows) {
    seen.clear();
    if (!std::isfinite(row.rhs)) throw ModelError("row " + row.name + " has a non-finite rhs");
    for (const Entry& e : row.entries) {
      if (e.index < 0 || static_cast<std::size_t>(e.index) >= n) {
        throw ModelError("row " + row.name + " references a column out of range");
      }
      if (!seen.insert(e.index).second) {
        throw ModelError("row " + row.name + " repeats a column");
      }
    }
  }
}

InstanceStats stats(const ProblemInstance& instance) {
  InstanceStats s;
  s.vars = instance.num_vars();
  s.rows = instance.num_rows();
  for (VarClass c : instance.var_class) {
    switch (c) {
      case VarClass::Binary: ++s.binaries; break;
      case VarClass::GeneralInteger: ++s.general_integers; break;
      case VarClass::Continuous: ++s.continuous; break;
    }
  }
  return s;
}

double row_activity(const Row& row, std::span<const double> values) {
  double activity = 0.0;
  for (const Entry& e : row.entries) activity += e.value * values[e.index];
  return activity;
}

double row_violation(const Row& row, double activity) {
  switch (row.sense) {
    case RowSense::LessEqual: return std::max(0.0, activity - row.rhs);
    case RowSense::GreaterEqual: return std::max(0.0, row.rhs - activity);
    case RowSense::Equal: return std::abs(activity - row.rhs);
  }
  return 0.0;
}

double fractionality(double value) { return std::abs(value - std::round(value)); }

Solution evaluate(const ProblemInstance& instance, std::span<const double> values) {
  const int n = instance.num_vars();
  if (static_cast<int>(values.size()) != n) {
    throw ModelError("assignment has " + std::to_string(values.size()) + " entries, expected " +
                     std::to_string(n));
  }
  Solution sol;
  sol.values.assign(values.begin(), values.end());
  double obj = instance.objective_constant;
  double worst = 0.0;
  for (int j = 0; j < n; ++j) {
    const double v = values[j];
    obj += instance.objective[j] * v;
    if (!std::isfinite(v)) {
      worst = kInf;
      continue;
    }
    worst = std::max(worst, instance.lower[j] - v);
    worst = std::max(worst, v - instance.upper[j]);
    if (instance.is_integer(j)) worst = std::max(worst, fractionality(v));
  }
  for (const Row& row : instance.rows) {
    worst = std::max(worst, row_violation(row, row_activity(row, values)));
  }
  sol.objective = obj;
  sol.max_violation = std::isnan(worst) ? kInf : worst;
  return sol;
}

Solution polish_and_evaluate(const ProblemInstance& instance, std::span<const double> values) {
  std::vector<double> rounded(values.begin(), values.end());
  for (int j = 0; j < instance.num_vars(); ++j) {
    if (instance.is_integer(j) && fractionality(rounded[j]) <= kFeasTol) {
      rounded[j] = std::round(rounded[j]);
    }
    rounded[j] = std::clamp(rounded[j], instance.lower[j], instance.upper[j]);
  }
  Solution polished = evaluate(instance, rounded);
  if (polished.feasible()) return polished;
  return evaluate(instance, values);
}

MpsParseError::MpsParseError(int line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

std::string format_double(double value) {
  if (value == 0.0) return "0";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) return std::to_string(value);
  return std::string(buf, end);
}

std::string write_sol(const Solution& solution, const ProblemInstance& instance) {
  std::string out = "=obj= " + format_double(solution.objective) + "\n";
  for (int j = 0; j < instance.num_vars(); ++j) {
    out += instance.var_names[j];
    out += ' ';
    const double v = solution.values[j];
    if (instance.is_integer(j)) {
      out += std::to_string(std::llround(v));
    } else {
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

std::vector<double> parse_sol(std::string_view text, const ProblemInstance& instance) {
  std::unordered_map<std::string, int> index;
  for (int j = 0; j < instance.num_vars(); ++j) index.emplace(instance.var_names[j], j);
  std::vector<double> values(instance.num_vars(), 0.0);
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    std::string name;
    std::string value;
    if (!(fields >> name) || name.starts_with('=') || name.starts_with('#')) continue;
    if (!(fields >> value)) continue;
    auto it = index.find(name);
    if (it == index.end()) continue;
    values[it->second] = std::stod(value);
  }
  return values;
}

}  // namespace poutine
