// SPDX-FileCopyrightText: Copyright (c) 2026 The Poutine Authors
// SPDX-License-Identifier: Apache-2.0

#include "poutine/lp.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace poutine {

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::IterationLimit: return "iteration-limit";
  }
  return "?";
}

namespace {

constexpr double kPrimalTol = 1e-9;
constexpr double kDualTol = 1e-9;
constexpr double kPivotTol = 1e-9;
constexpr double kSingularTol = 1e-11;
constexpr double kResultTol = 1e-7;
constexpr int kRefactorPeriod = 100;
constexpr long kBlandAfterDegenerate = 5000;
constexpr int kMaxRecoveries = 3;

struct ColEntry {
  int row;
  double value;
};

class Simplex {
 public:
  explicit Simplex(const LpRelaxation& rel) : inst_(*rel.instance) {
    n_ = inst_.num_vars();
    m_ = inst_.num_rows();
    total_ = n_ + m_;
    cols_.assign(n_, {});
    for (int i = 0; i < m_; ++i) {
      for (const Entry& e : inst_.rows[i].entries) {
        if (e.value != 0.0) cols_[e.index].push_back(ColEntry{i, e.value});
      }
    }
    lo_.resize(total_);
    hi_.resize(total_);
    cost_.assign(total_, 0.0);
    for (int j = 0; j < n_; ++j) {
      lo_[j] = inst_.lower[j];
      hi_[j] = inst_.upper[j];
    }
    for (const BoundOverride& o : rel.bound_overrides) {
      lo_[o.index] = o.lower;
      hi_[o.index] = o.upper;
    }
    for (int i = 0; i < m_; ++i) {
      const Row& row = inst_.rows[i];
      const int s = n_ + i;
      switch (row.sense) {
        case RowSense::LessEqual: lo_[s] = -kInf; hi_[s] = row.rhs; break;
        case RowSense::GreaterEqual: lo_[s] = row.rhs; hi_[s] = kInf; break;
        case RowSense::Equal: lo_[s] = row.rhs; hi_[s] = row.rhs; break;
      }
    }
    if (rel.objective_override) {
      const auto& ov = *rel.objective_override;
      assert(static_cast<int>(ov.coefficients.size()) == n_);
      std::copy(ov.coefficients.begin(), ov.coefficients.end(), cost_.begin());
      constant_ = ov.constant;
    } else {
      std::copy(inst_.objective.begin(), inst_.objective.end(), cost_.begin());
      constant_ = inst_.objective_constant;
    }
  }

  LpResult run(const Basis* warm, long cap, const Deadline& deadline) {
    LpResult result;
    for (int j = 0; j < n_; ++j) {
      if (lo_[j] > hi_[j] + kPrimalTol) {
        result.status = LpStatus::Infeasible;
        return result;
      }
    }
    if (warm == nullptr || !load_basis(*warm)) slack_basis();
    compute_basics();

    long degenerate = 0;
    int recoveries = 0;
    int pivots_since_refactor = 0;
    std::vector<double> cb(m_), y(m_), alpha(m_);

    for (long iter = 0;; ++iter) {
      result.iterations = iter;
      if (iter >= cap || ((iter & 31) == 0 && deadline.expired())) {
        result.status = LpStatus::IterationLimit;
        break;
      }
      if (pivots_since_refactor >= kRefactorPeriod) {
        if (!refactor_or_recover(recoveries)) break;
        pivots_since_refactor = 0;
      }

      bool phase1 = false;
      for (int i = 0; i < m_; ++i) {
        const int b = head_[i];
        const double v = x_[b];
        cb[i] = 0.0;
        if (v < lo_[b] - tol(lo_[b])) {
          cb[i] = -1.0;
          phase1 = true;
        } else if (v > hi_[b] + tol(hi_[b])) {
          cb[i] = 1.0;
          phase1 = true;
        }
      }
      if (!phase1) {
        for (int i = 0; i < m_; ++i) cb[i] = cost_[head_[i]];
      }
      for (int k = 0; k < m_; ++k) y[k] = 0.0;
      for (int i = 0; i < m_; ++i) {
        if (cb[i] == 0.0) continue;
        const double* row = &binv_[static_cast<std::size_t>(i) * m_];
        for (int k = 0; k < m_; ++k) y[k] += cb[i] * row[k];
      }

      const bool bland = degenerate >= kBlandAfterDegenerate;
      int entering = -1;
      int dir = 0;
      double best = 0.0;
      for (int j = 0; j < total_; ++j) {
        const BasisStatus st = status_[j];
        if (st == BasisStatus::Basic || lo_[j] == hi_[j]) continue;
        const double d = (phase1 ? 0.0 : cost_[j]) - column_dot(y, j);
        int want = 0;
        if (d < -kDualTol && (st == BasisStatus::AtLower || st == BasisStatus::Free)) want = 1;
        if (d > kDualTol && (st == BasisStatus::AtUpper || st == BasisStatus::Free)) want = -1;
        if (want == 0) continue;
        if (bland) {
          entering = j;
          dir = want;
          break;
        }
        if (std::abs(d) > best) {
          best = std::abs(d);
          entering = j;
          dir = want;
        }
      }

      if (entering < 0) {
        if (pivots_since_refactor > 0) {
          // Confirm on a fresh factorization before declaring a result.
          if (!refactor_or_recover(recoveries)) break;
          pivots_since_refactor = 0;
          continue;
        }
        if (phase1) {
          result.status = LpStatus::Infeasible;
          break;
        }
        if (!verify_rows()) {
          if (++recoveries > kMaxRecoveries) break;
          if (!factorize()) slack_basis();
          compute_basics();
          continue;
        }
        result.status = LpStatus::Optimal;
        break;
      }

      ftran(entering, alpha);

      // Harris two-pass ratio test.
      double theta_max = kInf;
      for (int i = 0; i < m_; ++i) {
        if (std::abs(alpha[i]) <= kPivotTol) continue;
        const double rate = -dir * alpha[i];
        double limit = 0.0;
        double target = 0.0;
        if (!blocking(i, rate, phase1, limit, target)) continue;
        theta_max = std::min(theta_max, limit + tol(target) / std::abs(rate));
      }
      int leave = -1;
      double leave_limit = kInf;
      double leave_target = 0.0;
      double leave_pivot = 0.0;
      for (int i = 0; i < m_; ++i) {
        if (std::abs(alpha[i]) <= kPivotTol) continue;
        const double rate = -dir * alpha[i];
        double limit = 0.0;
        double target = 0.0;
        if (!blocking(i, rate, phase1, limit, target)) continue;
        if (bland) {
          if (limit < leave_limit - 1e-12 ||
              (limit <= leave_limit + 1e-12 && leave >= 0 && head_[i] < head_[leave])) {
            leave = i;
            leave_limit = limit;
            leave_target = target;
          }
        } else if (limit <= theta_max && std::abs(alpha[i]) > leave_pivot) {
          leave = i;
          leave_limit = limit;
          leave_target = target;
          leave_pivot = std::abs(alpha[i]);
        }
      }

      const double range = hi_[entering] - lo_[entering];
      const bool flip = std::isfinite(range) && (leave < 0 || range <= leave_limit);
      if (leave < 0 && !flip) {
        if (!phase1) {
          result.status = LpStatus::Unbounded;
          break;
        }
        if (++recoveries > kMaxRecoveries) break;
        if (!factorize()) slack_basis();
        compute_basics();
        pivots_since_refactor = 0;
        continue;
      }

      const double step = flip ? range : std::max(0.0, leave_limit);
      if (step <= 1e-12) ++degenerate;
      x_[entering] += dir * step;
      for (int i = 0; i < m_; ++i) x_[head_[i]] += -dir * alpha[i] * step;

      if (flip) {
        if (dir > 0) {
          status_[entering] = BasisStatus::AtUpper;
          x_[entering] = hi_[entering];
        } else {
          status_[entering] = BasisStatus::AtLower;
          x_[entering] = lo_[entering];
        }
        continue;
      }

      const int leaving = head_[leave];
      x_[leaving] = leave_target;
      status_[leaving] = (leave_target == lo_[leaving]) ? BasisStatus::AtLower : BasisStatus::AtUpper;
      head_[leave] = entering;
      status_[entering] = BasisStatus::Basic;
      pivot(leave, alpha);
      ++pivots_since_refactor;
    }

    result.point.assign(x_.begin(), x_.begin() + n_);
    for (int j = 0; j < n_; ++j) result.point[j] = std::clamp(result.point[j], lo_[j], hi_[j]);
    double obj = constant_;
    for (int j = 0; j < n_; ++j) obj += cost_[j] * result.point[j];
    result.objective = obj;
    result.basis.status = status_;
    return result;
  }

 private:
  static double tol(double bound) {
    return kPrimalTol * std::max(1.0, std::isfinite(bound) ? std::abs(bound) : 1.0);
  }

  // Step length at which basic position i hits a bound while moving at
  // `rate` per unit step, and the bound value it lands on.
  bool blocking(int i, double rate, bool phase1, double& limit, double& target) const {
    const int b = head_[i];
    const double v = x_[b];
    const double l = lo_[b];
    const double u = hi_[b];
    if (phase1 && v < l - tol(l)) {
      if (rate <= 0.0) return false;
      limit = (l - v) / rate;
      target = l;
      return true;
    }
    if (phase1 && v > u + tol(u)) {
      if (rate >= 0.0) return false;
      limit = (v - u) / -rate;
      target = u;
      return true;
    }
    if (rate < 0.0 && std::isfinite(l)) {
      limit = std::max(0.0, (v - l) / -rate);
      target = l;
      return true;
    }
    if (rate > 0.0 && std::isfinite(u)) {
      limit = std::max(0.0, (u - v) / rate);
      target = u;
      return true;
    }
    return false;
  }

  double column_dot(const std::vector<double>& y, int j) const {
    if (j >= n_) return -y[j - n_];
    double s = 0.0;
    for (const ColEntry& e : cols_[j]) s += y[e.row] * e.value;
    return s;
  }

  void ftran(int j, std::vector<double>& alpha) const {
    std::fill(alpha.begin(), alpha.end(), 0.0);
    if (j >= n_) {
      const int r = j - n_;
      for (int i = 0; i < m_; ++i) alpha[i] = -binv_[static_cast<std::size_t>(i) * m_ + r];
      return;
    }
    for (int i = 0; i < m_; ++i) {
      const double* row = &binv_[static_cast<std::size_t>(i) * m_];
      double s = 0.0;
      for (const ColEntry& e : cols_[j]) s += row[e.row] * e.value;
      alpha[i] = s;
    }
  }

  void pivot(int r, const std::vector<double>& alpha) {
    const std::size_t mm = static_cast<std::size_t>(m_);
    double* prow = &binv_[r * mm];
    const double inv = 1.0 / alpha[r];
    for (int k = 0; k < m_; ++k) prow[k] *= inv;
    for (int i = 0; i < m_; ++i) {
      if (i == r || alpha[i] == 0.0) continue;
      double* row = &binv_[i * mm];
      const double f = alpha[i];
      for (int k = 0; k < m_; ++k) row[k] -= f * prow[k];
    }
  }

  void place_nonbasic(int j) {
    if (std::isfinite(lo_[j])) {
      status_[j] = BasisStatus::AtLower;
      x_[j] = lo_[j];
    } else if (std::isfinite(hi_[j])) {
      status_[j] = BasisStatus::AtUpper;
      x_[j] = hi_[j];
    } else {
      status_[j] = BasisStatus::Free;
      x_[j] = 0.0;
    }
  }

  void slack_basis() {
    status_.assign(total_, BasisStatus::AtLower);
    x_.assign(total_, 0.0);
    head_.resize(m_);
    for (int j = 0; j < n_; ++j) place_nonbasic(j);
    for (int i = 0; i < m_; ++i) {
      head_[i] = n_ + i;
      status_[n_ + i] = BasisStatus::Basic;
    }
    binv_.assign(static_cast<std::size_t>(m_) * m_, 0.0);
    for (int i = 0; i < m_; ++i) binv_[static_cast<std::size_t>(i) * m_ + i] = -1.0;
  }

  bool load_basis(const Basis& warm) {
    if (static_cast<int>(warm.status.size()) != total_) return false;
    int basics = 0;
    for (BasisStatus s : warm.status) basics += s == BasisStatus::Basic;
    if (basics != m_) return false;
    status_ = warm.status;
    x_.assign(total_, 0.0);
    head_.clear();
    for (int j = 0; j < total_; ++j) {
      switch (status_[j]) {
        case BasisStatus::Basic: head_.push_back(j); break;
        case BasisStatus::AtLower:
          if (std::isfinite(lo_[j])) {
            x_[j] = lo_[j];
          } else {
            place_nonbasic(j);
          }
          break;
        case BasisStatus::AtUpper:
          if (std::isfinite(hi_[j])) {
            x_[j] = hi_[j];
          } else {
            place_nonbasic(j);
          }
          break;
        case BasisStatus::Free: place_nonbasic(j); break;
      }
    }
    return factorize();
  }

  // Gauss-Jordan inversion of the basis matrix with partial pivoting.
  bool factorize() {
    const std::size_t mm = static_cast<std::size_t>(m_);
    std::vector<double> a(mm * mm, 0.0);
    for (int i = 0; i < m_; ++i) {
      const int j = head_[i];
      if (j >= n_) {
        a[(j - n_) * mm + i] = -1.0;
      } else {
        for (const ColEntry& e : cols_[j]) a[e.row * mm + i] = e.value;
      }
    }
    std::vector<double> inv(mm * mm, 0.0);
    for (std::size_t i = 0; i < mm; ++i) inv[i * mm + i] = 1.0;
    for (std::size_t c = 0; c < mm; ++c) {
      std::size_t p = c;
      double best = std::abs(a[c * mm + c]);
      for (std::size_t r = c + 1; r < mm; ++r) {
        if (std::abs(a[r * mm + c]) > best) {
          best = std::abs(a[r * mm + c]);
          p = r;
        }
      }
      if (best < kSingularTol) return false;
      if (p != c) {
        for (std::size_t k = 0; k < mm; ++k) {
          std::swap(a[p * mm + k], a[c * mm + k]);
          std::swap(inv[p * mm + k], inv[c * mm + k]);
        }
      }
      const double d = 1.0 / a[c * mm + c];
      for (std::size_t k = 0; k < mm; ++k) {
        a[c * mm + k] *= d;
        inv[c * mm + k] *= d;
      }
      for (std::size_t r = 0; r < mm; ++r) {
        if (r == c) continue;
        const double f = a[r * mm + c];
        if (f == 0.0) continue;
        for (std::size_t k = 0; k < mm; ++k) {
          a[r * mm + k] -= f * a[c * mm + k];
          inv[r * mm + k] -= f * inv[c * mm + k];
        }
      }
    }
    binv_ = std::move(inv);
    return true;
  }

  bool refactor_or_recover(int& recoveries) {
    if (!factorize()) {
      if (++recoveries > kMaxRecoveries) return false;
      slack_basis();
    }
    compute_basics();
    return true;
  }

  void compute_basics() {
    std::vector<double> rhs(m_, 0.0);
    for (int j = 0; j < total_; ++j) {
      if (status_[j] == BasisStatus::Basic || x_[j] == 0.0) continue;
      if (j >= n_) {
        rhs[j - n_] += x_[j];
      } else {
        for (const ColEntry& e : cols_[j]) rhs[e.row] -= e.value * x_[j];
      }
    }
    for (int i = 0; i < m_; ++i) {
      const double* row = &binv_[static_cast<std::size_t>(i) * m_];
      double s = 0.0;
      for (int k = 0; k < m_; ++k) s += row[k] * rhs[k];
      x_[head_[i]] = s;
    }
  }

  bool verify_rows() const {
    for (int j = 0; j < n_; ++j) {
      if (x_[j] < lo_[j] - kResultTol || x_[j] > hi_[j] + kResultTol) return false;
    }
    for (int i = 0; i < m_; ++i) {
      const Row& row = inst_.rows[i];
      double act = 0.0;
      for (const Entry& e : row.entries) act += e.value * std::clamp(x_[e.index], lo_[e.index], hi_[e.index]);
      if (row_violation(row, act) > kResultTol * std::max(1.0, std::abs(row.rhs))) return false;
    }
    return true;
  }

  const ProblemInstance& inst_;
  int n_ = 0;
  int m_ = 0;
  int total_ = 0;
  std::vector<std::vector<ColEntry>> cols_;
  std::vector<double> lo_, hi_, cost_;
  double constant_ = 0.0;
  std::vector<double> x_;
  std::vector<BasisStatus> status_;
  std::vector<int> head_;
  std::vector<double> binv_;
};

}  // namespace

LpResult solve_lp(const LpRelaxation& relaxation, const Basis* warm_basis, long iteration_cap,
                  const Deadline& deadline) {
  assert(relaxation.instance != nullptr);
  return Simplex(relaxation).run(warm_basis, std::max(1L, iteration_cap), deadline);
}

}  // namespace poutine
