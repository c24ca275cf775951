// SPDX-FileCopyrightText: Copyright (c) 2026 The Poutine Authors
// SPDX-License-Identifier: Apache-2.0

#include <zlib.h>

#include <cmath>
#include <cstdlib>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "poutine/model.hpp"

namespace poutine {

namespace {

enum class Section { None, Name, ObjSense, Rows, Columns, Rhs, Ranges, Bounds, End };

int rank(Section s) {
  switch (s) {
    case Section::None: return 0;
    case Section::Name: return 1;
    case Section::ObjSense: return 2;
    case Section::Rows: return 3;
    case Section::Columns: return 4;
    case Section::Rhs: return 5;
    case Section::Ranges: return 6;
    case Section::Bounds: return 7;
    case Section::End: return 8;
  }
  return 0;
}

std::vector<std::string_view> tokenize(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    if (i >= line.size()) break;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    tokens.push_back(line.substr(i, j - i));
    i = j;
  }
  return tokens;
}

// Values at or beyond this magnitude are read as infinite.
constexpr double kMpsInfinity = 1e30;

struct ColumnData {
  std::string name;
  double cost = 0.0;
  bool integer = false;
  bool binary_declared = false;
  bool bounds_touched = false;
  double lower = 0.0;
  double upper = kInf;
  bool upper_set = false;
};

struct RowData {
  std::string name;
  RowSense sense = RowSense::LessEqual;
  double rhs = 0.0;
  std::optional<double> range;
  std::vector<Entry> entries;
};

class MpsReader {
 public:
  ProblemInstance parse(std::string_view text) {
    std::size_t pos = 0;
    while (pos <= text.size()) {
      std::size_t eol = text.find('\n', pos);
      if (eol == std::string_view::npos) eol = text.size();
      ++line_no_;
      handle_line(text.substr(pos, eol - pos));
      if (section_ == Section::End) break;
      pos = eol + 1;
    }
    if (section_ != Section::End) fail("missing ENDATA");
    return finish();
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw MpsParseError(line_no_, what); }

  double number(std::string_view token) const {
    std::string s(token);
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') fail("expected a number, got '" + s + "'");
    if (v >= kMpsInfinity) return kInf;
    if (v <= -kMpsInfinity) return -kInf;
    return v;
  }

  void enter(Section next) {
    if (rank(next) <= rank(section_) && !(next == section_ && next == Section::ObjSense)) {
      fail("section out of order");
    }
    section_ = next;
  }

  void handle_line(std::string_view line) {
    if (line.empty() || line[0] == '*') return;
    auto tokens = tokenize(line);
    if (tokens.empty()) return;
    const bool header = line[0] != ' ' && line[0] != '\t';
    if (header) {
      handle_header(tokens);
      return;
    }
    switch (section_) {
      case Section::ObjSense: objsense(tokens[0]); break;
      case Section::Rows: rows_line(tokens); break;
      case Section::Columns: columns_line(tokens); break;
      case Section::Rhs: rhs_line(tokens); break;
      case Section::Ranges: ranges_line(tokens); break;
      case Section::Bounds: bounds_line(tokens); break;
      case Section::Name: break;
      default: fail("data line outside of a section");
    }
  }

  void handle_header(const std::vector<std::string_view>& tokens) {
    const std::string_view key = tokens[0];
    if (key == "NAME") {
      enter(Section::Name);
      if (tokens.size() > 1) name_ = std::string(tokens[1]);
    } else if (key == "OBJSENSE") {
      enter(Section::ObjSense);
      if (tokens.size() > 1) objsense(tokens[1]);
    } else if (key == "ROWS") {
      enter(Section::Rows);
    } else if (key == "COLUMNS") {
      enter(Section::Columns);
    } else if (key == "RHS") {
      enter(Section::Rhs);
    } else if (key == "RANGES") {
      enter(Section::Ranges);
    } else if (key == "BOUNDS") {
      enter(Section::Bounds);
    } else if (key == "ENDATA") {
      enter(Section::End);
    } else if (key == "OBJNAME" || key == "SOS" || key == "QUADOBJ" || key == "QMATRIX" || key == "QSECTION" ||
               key == "QCMATRIX" || key == "CSECTION" || key == "INDICATORS") {
      fail("unsupported section " + std::string(key));
    } else {
      fail("unknown section " + std::string(key));
    }
  }

  void objsense(std::string_view token) {
    if (token == "MAX" || token == "MAXIMIZE") {
      maximize_ = true;
    } else if (token == "MIN" || token == "MINIMIZE") {
      maximize_ = false;
    } else {
      fail("unknown objective sense " + std::string(token));
    }
  }

  void rows_line(const std::vector<std::string_view>& tokens) {
    if (tokens.size() < 2) fail("ROWS entry needs a type and a name");
    const std::string name(tokens[1]);
    const std::string_view type = tokens[0];
    if (type == "N") {
      if (!objective_name_.empty()) fail("duplicate objective row " + name);
      objective_name_ = name;
      return;
    }
    RowData row;
    row.name = name;
    if (type == "L") {
      row.sense = RowSense::LessEqual;
    } else if (type == "G") {
      row.sense = RowSense::GreaterEqual;
    } else if (type == "E") {
      row.sense = RowSense::Equal;
    } else {
      fail("unknown row type " + std::string(type));
    }
    if (row_index_.contains(name) || name == objective_name_) fail("duplicate row " + name);
    row_index_.emplace(name, static_cast<int>(rows_.size()));
    rows_.push_back(std::move(row));
  }

  // -1 for the objective row.
  int row_ref(std::string_view name) const {
    if (name == objective_name_) return -1;
    auto it = row_index_.find(std::string(name));
    if (it == row_index_.end()) fail("unknown row " + std::string(name));
    return it->second;
  }

  void columns_line(const std::vector<std::string_view>& tokens) {
    if (tokens.size() >= 3 && tokens[1] == "'MARKER'") {
      if (tokens[2] == "'INTORG'") {
        in_integer_block_ = true;
      } else if (tokens[2] == "'INTEND'") {
        in_integer_block_ = false;
      } else {
        fail("unknown marker " + std::string(tokens[2]));
      }
      return;
    }
    if (tokens.size() != 3 && tokens.size() != 5) fail("COLUMNS entry has a bad field count");
    const std::string name(tokens[0]);
    auto [it, inserted] = column_index_.emplace(name, static_cast<int>(columns_.size()));
    if (inserted) {
      ColumnData col;
      col.name = name;
      col.integer = in_integer_block_;
      columns_.push_back(std::move(col));
    }
    const int j = it->second;
    for (std::size_t k = 1; k + 1 < tokens.size(); k += 2) {
      const int r = row_ref(tokens[k]);
      const double v = number(tokens[k + 1]);
      if (r < 0) {
        columns_[j].cost += v;
        continue;
      }
      if (!seen_entries_.insert((static_cast<long long>(r) << 32) | j).second) {
        fail("duplicate entry for column " + name + " in row " + std::string(tokens[k]));
      }
      if (v != 0.0) rows_[r].entries.push_back(Entry{j, v});
    }
  }

  // Drops the optional set name: odd token counts carry one.
  static std::size_t pair_offset(const std::vector<std::string_view>& tokens) {
    return tokens.size() % 2 == 1 ? 1 : 0;
  }

  void rhs_line(const std::vector<std::string_view>& tokens) {
    const std::size_t first = pair_offset(tokens);
    if (tokens.size() - first < 2) fail("RHS entry has a bad field count");
    for (std::size_t k = first; k + 1 < tokens.size(); k += 2) {
      const int r = row_ref(tokens[k]);
      const double v = number(tokens[k + 1]);
      if (r < 0) {
        objective_rhs_ = v;
      } else {
        rows_[r].rhs = v;
      }
    }
  }

  void ranges_line(const std::vector<std::string_view>& tokens) {
    const std::size_t first = pair_offset(tokens);
    if (tokens.size() - first < 2) fail("RANGES entry has a bad field count");
    for (std::size_t k = first; k + 1 < tokens.size(); k += 2) {
      const int r = row_ref(tokens[k]);
      if (r < 0) fail("RANGES entry on the objective row");
      rows_[r].range = number(tokens[k + 1]);
    }
  }

  void bounds_line(const std::vector<std::string_view>& tokens) {
    if (tokens.size() < 2) fail("BOUNDS entry has a bad field count");
    const std::string_view type = tokens[0];
    const bool needs_value = type == "UP" || type == "LO" || type == "FX" || type == "LI" ||
                             type == "UI" || type == "SC";
    const bool no_value = type == "FR" || type == "MI" || type == "PL" || type == "BV";
    if (!needs_value && !no_value) fail("unknown bound type " + std::string(type));
    if (type == "SC") fail("semicontinuous bounds are not supported");

    std::string_view col_name;
    std::optional<double> value;
    if (needs_value) {
      if (tokens.size() == 4) {
        col_name = tokens[2];
      } else if (tokens.size() == 3) {
        col_name = tokens[1];
      } else {
        fail("BOUNDS entry has a bad field count");
      }
      value = number(tokens.back());
    } else {
      if (tokens.size() == 3 || tokens.size() == 4) {
        col_name = tokens[2];
      } else {
        col_name = tokens[1];
      }
    }
    auto it = column_index_.find(std::string(col_name));
    if (it == column_index_.end()) fail("unknown column " + std::string(col_name));
    ColumnData& col = columns_[it->second];
    col.bounds_touched = true;
    if (type == "UP" || type == "UI") {
      col.upper = *value;
      col.upper_set = true;
      if (*value < 0.0 && col.lower == 0.0) col.lower = -kInf;
      if (type == "UI") col.integer = true;
    } else if (type == "LO" || type == "LI") {
      col.lower = *value;
      if (type == "LI") col.integer = true;
    } else if (type == "FX") {
      col.lower = *value;
      col.upper = *value;
      col.upper_set = true;
    } else if (type == "FR") {
      col.lower = -kInf;
      col.upper = kInf;
      col.upper_set = true;
    } else if (type == "MI") {
      col.lower = -kInf;
    } else if (type == "PL") {
      col.upper = kInf;
      col.upper_set = true;
    } else if (type == "BV") {
      col.integer = true;
      col.binary_declared = true;
      col.lower = 0.0;
      col.upper = 1.0;
      col.upper_set = true;
    }
  }

  ProblemInstance finish() {
    ProblemInstance inst;
    inst.name = name_;
    const double sign = maximize_ ? -1.0 : 1.0;
    for (const ColumnData& col : columns_) {
      VarClass cls = VarClass::Continuous;
      double lo = col.lower;
      double hi = col.upper;
      if (col.integer) {
        if (col.binary_declared || !col.bounds_touched) {
          cls = VarClass::Binary;
          if (!col.bounds_touched) {
            lo = 0.0;
            hi = 1.0;
          }
        } else {
          if (std::isfinite(lo)) lo = std::ceil(lo - 1e-9);
          if (std::isfinite(hi)) hi = std::floor(hi + 1e-9);
          cls = (lo == 0.0 && hi == 1.0) ? VarClass::Binary : VarClass::GeneralInteger;
        }
      }
      inst.add_variable(col.name, cls, lo, hi, sign * col.cost);
    }
    inst.objective_constant = sign * -objective_rhs_;
    for (RowData& row : rows_) {
      if (!row.range) {
        inst.add_row(row.name, std::move(row.entries), row.sense, row.rhs);
        continue;
      }
      const double r = *row.range;
      double lo = row.rhs;
      double hi = row.rhs;
      switch (row.sense) {
        case RowSense::LessEqual: lo = row.rhs - std::abs(r); break;
        case RowSense::GreaterEqual: hi = row.rhs + std::abs(r); break;
        case RowSense::Equal: (r >= 0.0 ? hi : lo) = row.rhs + r; break;
      }
      if (lo == hi) {
        inst.add_row(row.name, std::move(row.entries), RowSense::Equal, lo);
      } else if (row.sense == RowSense::LessEqual) {
        inst.add_row(row.name, row.entries, RowSense::LessEqual, hi);
        inst.add_row(row.name + "_rng", std::move(row.entries), RowSense::GreaterEqual, lo);
      } else {
        inst.add_row(row.name, row.entries, RowSense::GreaterEqual, lo);
        inst.add_row(row.name + "_rng", std::move(row.entries), RowSense::LessEqual, hi);
      }
    }
    try {
      inst.validate();
    } catch (const ModelError& e) {
      fail(e.what());
    }
    return inst;
  }

  int line_no_ = 0;
  Section section_ = Section::None;
  std::string name_;
  bool maximize_ = false;
  bool in_integer_block_ = false;
  std::string objective_name_;
  double objective_rhs_ = 0.0;
  std::vector<RowData> rows_;
  std::unordered_map<std::string, int> row_index_;
  std::vector<ColumnData> columns_;
  std::unordered_map<std::string, int> column_index_;
  std::unordered_set<long long> seen_entries_;
};

}  // namespace

ProblemInstance parse_mps(std::string_view text) { return MpsReader{}.parse(text); }

ProblemInstance read_mps_file(const std::filesystem::path& path) {
  gzFile file = gzopen(path.c_str(), "rb");
  if (file == nullptr) throw std::runtime_error("cannot open " + path.string());
  std::string text;
  char buf[1 << 16];
  int got = 0;
  while ((got = gzread(file, buf, sizeof(buf))) > 0) text.append(buf, static_cast<std::size_t>(got));
  const bool failed = got < 0;
  gzclose(file);
  if (failed) throw std::runtime_error("cannot decompress " + path.string());
  ProblemInstance inst = parse_mps(text);
  if (inst.name.empty()) inst.name = path.stem().string();
  return inst;
}

}  // namespace poutine
