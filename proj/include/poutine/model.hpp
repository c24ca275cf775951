// SPDX-FileCopyrightText: Copyright (c) 2026 The Poutine Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace poutine {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Absolute tolerance on rows, bounds and integrality.
inline constexpr double kFeasTol = 1e-6;

enum class VarClass : std::uint8_t { Binary, GeneralInteger, Continuous };

enum class RowSense : std::uint8_t { LessEqual, Equal, GreaterEqual };

struct Entry {
  int index;
  double value;
};

struct Row {
  std::string name;
  std::vector<Entry> entries;
  RowSense sense = RowSense::LessEqual;
  double rhs = 0.0;
};

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Minimization MILP: min c'x + constant over rows, bounds and integrality.
///
/// Rows keep their native relation; nothing is converted to <= form.
struct ProblemInstance {
  std::string name;
  std::vector<double> objective;
  double objective_constant = 0.0;
  std::vector<Row> rows;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<VarClass> var_class;
  std::vector<std::string> var_names;

  int num_vars() const { return static_cast<int>(objective.size()); }
  int num_rows() const { return static_cast<int>(rows.size()); }

  bool is_integer(int j) const { return var_class[j] != VarClass::Continuous; }

  /// Appends a column and returns its index.
  int add_variable(std::string var_name, VarClass cls, double lo, double hi, double cost = 0.0);

  /// Appends a row and returns its index.
  int add_row(std::string row_name, std::vector<Entry> entries, RowSense sense, double rhs);

  /// Throws ModelError when a structural invariant is broken.
  void validate() const;
};

struct InstanceStats {
  int vars = 0;
  int rows = 0;
  int binaries = 0;
  int general_integers = 0;
  int continuous = 0;
};

InstanceStats stats(const ProblemInstance& instance);

/// A candidate assignment together with its objective and worst violation.
struct Solution {
  std::vector<double> values;
  double objective = kInf;
  double max_violation = kInf;

  bool feasible(double tol = kFeasTol) const { return max_violation <= tol; }
};

double row_activity(const Row& row, std::span<const double> values);

/// Amount by which `activity` misses the row's relation (0 when satisfied).
double row_violation(const Row& row, double activity);

double fractionality(double value);

/// Objective, and max over row, bound and integrality violations.
Solution evaluate(const ProblemInstance& instance, std::span<const double> values);

/// Rounds integer-class entries that sit within kFeasTol of an integer, then
/// evaluates. Falls back to the raw point when rounding breaks feasibility.
Solution polish_and_evaluate(const ProblemInstance& instance, std::span<const double> values);

class MpsParseError : public std::runtime_error {
 public:
  MpsParseError(int line, const std::string& what);
  int line() const { return line_; }

 private:
  int line_;
};

/// Parses fixed or free MPS. MAX objectives are negated into minimize form.
ProblemInstance parse_mps(std::string_view text);

/// Reads an MPS file; gzip-compressed files are decompressed transparently.
ProblemInstance read_mps_file(const std::filesystem::path& path);

/// MIPLIB .sol text: `=obj= <value>` then one `<name> <value>` line per column.
std::string write_sol(const Solution& solution, const ProblemInstance& instance);

/// Reads values back from .sol text by variable name. Missing names are 0.
std::vector<double> parse_sol(std::string_view text, const ProblemInstance& instance);

std::string format_double(double value);

}  // namespace poutine
