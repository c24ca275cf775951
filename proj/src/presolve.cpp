// SPDX-FileCopyrightText: Copyright (c) 2026 The Poutine Authors
// SPDX-License-Identifier: Apache-2.0

#include "poutine/presolve.hpp"

#include <cmath>
#include <string>

namespace poutine {

namespace {

constexpr double kBoundTol = 1e-9;
constexpr double kMinSingletonCoef = 1e-9;

class Presolver {
 public:
  explicit Presolver(const ProblemInstance& inst)
      : inst_(inst),
        lo_(inst.lower),
        hi_(inst.upper),
        rhs_(inst.num_rows()),
        col_active_(inst.num_vars(), true),
        row_active_(inst.num_rows(), true),
        constant_(inst.objective_constant) {
    for (int i = 0; i < inst.num_rows(); ++i) rhs_[i] = inst.rows[i].rhs;
  }

  PresolveResult run() {
    for (int pass = 0; pass < kMaxPresolvePasses; ++pass) {
      bool changed = fix_columns();
      changed |= reduce_rows();
      if (!changed) break;
    }
    return build();
  }

 private:
  bool fix_columns() {
    bool changed = false;
    for (int j = 0; j < inst_.num_vars(); ++j) {
      if (!col_active_[j] || lo_[j] != hi_[j]) continue;
      const double v = lo_[j];
      col_active_[j] = false;
      constant_ += inst_.objective[j] * v;
      record_.reductions.emplace_back(FixedVariable{j, v});
      changed = true;
    }
    if (changed) refresh_rhs();
    return changed;
  }

  void refresh_rhs() {
    for (int i = 0; i < inst_.num_rows(); ++i) {
      double b = inst_.rows[i].rhs;
      for (const Entry& e : inst_.rows[i].entries) {
        if (!col_active_[e.index]) b -= e.value * lo_[e.index];
      }
      rhs_[i] = b;
    }
  }

  bool reduce_rows() {
    bool changed = false;
    for (int i = 0; i < inst_.num_rows(); ++i) {
      if (!row_active_[i]) continue;
      const Row& row = inst_.rows[i];
      int count = 0;
      const Entry* single = nullptr;
      for (const Entry& e : row.entries) {
        if (col_active_[e.index] && e.value != 0.0) {
          ++count;
          single = &e;
        }
      }
      if (count == 0) {
        if (row_violation(Row{{}, {}, row.sense, rhs_[i]}, 0.0) > kBoundTol) {
          throw ProvenInfeasible("row " + row.name + " has no columns and cannot be satisfied");
        }
        drop_row(i);
        changed = true;
      } else if (count == 1 && std::abs(single->value) >= kMinSingletonCoef) {
        singleton_to_bound(i, *single);
        drop_row(i);
        changed = true;
      }
    }
    return changed;
  }

  void drop_row(int i) {
    row_active_[i] = false;
    record_.reductions.emplace_back(RemovedRow{i});
  }

  void singleton_to_bound(int i, const Entry& e) {
    const RowSense sense = inst_.rows[i].sense;
    const double bound = rhs_[i] / e.value;
    const bool upper_side = (sense == RowSense::LessEqual) == (e.value > 0.0);
    if (sense == RowSense::Equal) {
      tighten(e.index, BoundSide::Lower, bound);
      tighten(e.index, BoundSide::Upper, bound);
    } else {
      tighten(e.index, upper_side ? BoundSide::Upper : BoundSide::Lower, bound);
    }
  }

  void tighten(int j, BoundSide side, double value) {
    if (inst_.is_integer(j)) {
      value = side == BoundSide::Lower ? std::ceil(value - kBoundTol) : std::floor(value + kBoundTol);
    }
    if (side == BoundSide::Lower && value > lo_[j]) {
      if (!inst_.is_integer(j) && std::abs(value - hi_[j]) <= kBoundTol) value = hi_[j];
      record_.reductions.emplace_back(TightenedBound{j, side, lo_[j], value});
      lo_[j] = value;
    } else if (side == BoundSide::Upper && value < hi_[j]) {
      if (!inst_.is_integer(j) && std::abs(value - lo_[j]) <= kBoundTol) value = lo_[j];
      record_.reductions.emplace_back(TightenedBound{j, side, hi_[j], value});
      hi_[j] = value;
    }
    if (lo_[j] > hi_[j] + kBoundTol) {
      throw ProvenInfeasible("bounds of column " + inst_.var_names[j] + " cross");
    }
    if (lo_[j] > hi_[j]) hi_[j] = lo_[j];
  }

  PresolveResult build() {
    PresolveResult out;
    ProblemInstance& red = out.reduced;
    red.name = inst_.name;
    red.objective_constant = constant_;
    std::vector<int> new_index(inst_.num_vars(), -1);
    for (int j = 0; j < inst_.num_vars(); ++j) {
      if (!col_active_[j]) continue;
      new_index[j] = red.add_variable(inst_.var_names[j], inst_.var_class[j], lo_[j], hi_[j],
                                      inst_.objective[j]);
      record_.column_map.push_back(j);
    }
    for (int i = 0; i < inst_.num_rows(); ++i) {
      if (!row_active_[i]) continue;
      std::vector<Entry> entries;
      for (const Entry& e : inst_.rows[i].entries) {
        if (col_active_[e.index] && e.value != 0.0) entries.push_back(Entry{new_index[e.index], e.value});
      }
      red.add_row(inst_.rows[i].name, std::move(entries), inst_.rows[i].sense, rhs_[i]);
      record_.row_map.push_back(i);
    }
    record_.original_vars = inst_.num_vars();
    record_.original_rows = inst_.num_rows();
    out.record = std::move(record_);
    return out;
  }

  const ProblemInstance& inst_;
  std::vector<double> lo_, hi_, rhs_;
  std::vector<bool> col_active_, row_active_;
  double constant_;
  PresolveRecord record_;
};

}  // namespace

PresolveResult presolve(const ProblemInstance& instance) { return Presolver(instance).run(); }

PresolveRecord identity_record(const ProblemInstance& instance) {
  PresolveRecord record;
  record.original_vars = instance.num_vars();
  record.original_rows = instance.num_rows();
  for (int j = 0; j < instance.num_vars(); ++j) record.column_map.push_back(j);
  for (int i = 0; i < instance.num_rows(); ++i) record.row_map.push_back(i);
  return record;
}

Solution uncrush(const Solution& reduced, const PresolveRecord& record,
                 const ProblemInstance& original) {
  if (reduced.values.size() != record.column_map.size() ||
      record.original_vars != original.num_vars()) {
    throw ModelError("presolve record does not match the solution or instance dimensions");
  }
  std::vector<double> values(original.num_vars(), 0.0);
  for (std::size_t j = 0; j < record.column_map.size(); ++j) {
    values[record.column_map[j]] = reduced.values[j];
  }
  for (const Reduction& r : record.reductions) {
    if (const auto* fixed = std::get_if<FixedVariable>(&r)) values[fixed->index] = fixed->value;
  }
  return evaluate(original, values);
}

}  // namespace poutine
