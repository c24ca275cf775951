// SPDX-FileCopyrightText: Copyright (c) 2026 The Poutine Authors
// SPDX-License-Identifier: Apache-2.0

#include "poutine/orchestrator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <thread>

#include "poutine/rlb.hpp"

namespace poutine {

std::optional<Solution> random_instantiation(const ProblemInstance& instance, std::mt19937_64& rng,
                                             const Deadline& deadline) {
  const int n = instance.num_vars();
  std::vector<int> integers;
  bool has_continuous = false;
  for (int j = 0; j < n; ++j) {
    if (instance.is_integer(j)) {
      integers.push_back(j);
    } else {
      has_continuous = true;
    }
  }
  std::vector<double> lo(n), hi(n);
  for (int j : integers) {
    lo[j] = std::ceil(std::max(instance.lower[j], -kRandomRangeCap));
    hi[j] = std::floor(std::min(instance.upper[j], kRandomRangeCap));
    if (lo[j] > hi[j]) return std::nullopt;
  }
  std::vector<double> point(n, 0.0);
  while (!deadline.expired()) {
    for (int j : integers) {
      std::uniform_int_distribution<long long> pick(static_cast<long long>(lo[j]),
                                                    static_cast<long long>(hi[j]));
      point[j] = static_cast<double>(pick(rng));
    }
    if (!has_continuous) {
      Solution s = evaluate(instance, point);
      if (s.feasible()) return s;
      continue;
    }
    LpRelaxation rel{&instance, {}, std::nullopt};
    for (int j : integers) rel.bound_overrides.push_back({j, point[j], point[j]});
    LpResult lp = solve_lp(rel, nullptr, kDefaultIterationCap, deadline);
    if (lp.status != LpStatus::Optimal) continue;
    Solution s = polish_and_evaluate(instance, lp.point);
    if (s.feasible()) return s;
  }
  return std::nullopt;
}

EventLog::EventLog() : start_(std::chrono::steady_clock::now()) {}

EventLog::EventLog(const std::filesystem::path& path) : EventLog() {
  if (!path.empty()) {
    file_.open(path, std::ios::out | std::ios::trunc);
    if (!file_) throw std::runtime_error("cannot open log file " + path.string());
  }
}

void EventLog::record(int worker, std::string_view event, std::optional<double> objective) {
  std::lock_guard lock(mutex_);
  const double t = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  char stamp[32];
  std::snprintf(stamp, sizeof(stamp), "%.1f", std::floor(t * 10.0) / 10.0);
  std::string line = stamp;
  line += ',';
  line += std::to_string(worker);
  line += ',';
  line += event;
  line += ',';
  if (objective) line += format_double(*objective);
  if (file_.is_open()) {
    file_ << line << '\n';
    file_.flush();
  }
  lines_.push_back(std::move(line));
}

std::vector<std::string> EventLog::lines() const {
  std::lock_guard lock(mutex_);
  return lines_;
}

IncumbentStore::IncumbentStore(const ProblemInstance& original, const PresolveRecord& record,
                               std::filesystem::path sol_path, EventLog* log)
    : original_(original), record_(record), sol_path_(std::move(sol_path)), log_(log) {}

bool IncumbentStore::try_update(const Solution& candidate, int worker) {
  Solution full = uncrush(candidate, record_, original_);
  std::lock_guard lock(mutex_);
  if (!full.feasible()) {
    ++rejected_infeasible_;
    if (log_ != nullptr) log_->record(worker, "rejected_infeasible", full.objective);
    return false;
  }
  if (best_ && !(full.objective < best_->objective - 1e-9)) return false;
  improvements_.push_back(full.objective);
  best_reduced_ = candidate;
  best_ = std::move(full);
  if (!sol_path_.empty()) write_sol_file(*best_);
  if (log_ != nullptr) log_->record(worker, "incumbent", best_->objective);
  return true;
}

void IncumbentStore::write_sol_file(const Solution& sol) const {
  std::filesystem::path tmp = sol_path_;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::out | std::ios::trunc);
    out << write_sol(sol, original_);
  }
  std::filesystem::rename(tmp, sol_path_);
}

std::optional<Solution> IncumbentStore::best() const {
  std::lock_guard lock(mutex_);
  return best_;
}

std::optional<Solution> IncumbentStore::best_reduced() const {
  std::lock_guard lock(mutex_);
  return best_reduced_;
}

std::vector<double> IncumbentStore::improvements() const {
  std::lock_guard lock(mutex_);
  return improvements_;
}

int IncumbentStore::rejected_infeasible() const {
  std::lock_guard lock(mutex_);
  return rejected_infeasible_;
}

namespace {

struct WorkerContext {
  const ProblemInstance& reduced;
  IncumbentStore& store;
  EventLog* log;
  const Deadline& deadline;
};

void note(const WorkerContext& ctx, int worker, std::string_view event,
          std::optional<double> objective = std::nullopt) {
  if (ctx.log != nullptr) ctx.log->record(worker, event, objective);
}

WorkerReport run_worker(const WorkerConfig& cfg, const WorkerContext& ctx) {
  WorkerReport report;
  report.worker = cfg.id;
  report.config = cfg.describe();
  note(ctx, cfg.id, "start");

  std::optional<Solution> own;
  std::vector<double> seed;
  auto found = [&](std::string_view stage, Solution s) {
    note(ctx, cfg.id, std::string(stage) + "_found", s.objective);
    if (!report.heuristic_objective) report.heuristic_objective = s.objective;
    ctx.store.try_update(s, cfg.id);
    seed = s.values;
    own = std::move(s);
  };

  for (const Stage& stage : cfg.stages) {
    if (ctx.deadline.expired()) break;
    if (const auto* d = std::get_if<DiveStage>(&stage)) {
      DiveOutcome out = run_dive(ctx.reduced, d->rule, d->max_dives, ctx.deadline);
      if (out.solution) {
        found("dive", std::move(*out.solution));
      } else {
        note(ctx, cfg.id, "dive_failed");
        seed = std::move(out.seed_point);
      }
    } else if (const auto* f = std::get_if<FpStage>(&stage)) {
      FPOutcome out = run_fp(ctx.reduced, f->config, ctx.deadline);
      if (out.solution) {
        found("fp", std::move(*out.solution));
      } else {
        note(ctx, cfg.id, "fp_failed");
        seed = std::move(out.x_tilde);
      }
    } else if (const auto* r = std::get_if<RlbStage>(&stage)) {
      if (own || seed.empty()) continue;
      if (auto s = run_rlb(ctx.reduced, seed, r->k, ctx.deadline)) {
        found("rlb", std::move(*s));
      } else {
        note(ctx, cfg.id, "rlb_failed");
      }
    } else if (const auto* rnd = std::get_if<RandomStage>(&stage)) {
      std::mt19937_64 rng(rnd->seed);
      if (auto s = random_instantiation(ctx.reduced, rng, ctx.deadline)) {
        found("random", std::move(*s));
      } else {
        note(ctx, cfg.id, "random_failed");
      }
    } else if (const auto* b = std::get_if<BnbStage>(&stage)) {
      std::optional<Solution> warm = own ? own : ctx.store.best_reduced();
      BnbBudget budget;
      budget.deadline = ctx.deadline;
      BnbOptions opts;
      opts.seed = b->seed;
      const int id = cfg.id;
      IncumbentSink sink = [&ctx, id](const Solution& s) {
        note(ctx, id, "bnb_improved", s.objective);
        ctx.store.try_update(s, id);
      };
      BnbResult res = solve_bnb(ctx.reduced, warm ? &*warm : nullptr, budget, sink, opts);
      report.bnb_status = res.status;
      report.lower_bound = res.lower_bound;
      report.bnb_nodes = res.nodes;
      note(ctx, id, std::string("bnb_") + to_string(res.status),
           res.best ? std::optional<double>(res.best->objective) : std::nullopt);
    }
  }
  note(ctx, cfg.id, "finish");
  return report;
}

}  // namespace

PoutineReport run_poutine(const ProblemInstance& original, const std::vector<WorkerConfig>& portfolio,
                          const RunOptions& options) {
  if (!(options.time_limit > 0.0)) throw std::invalid_argument("time limit must be positive");
  for (const WorkerConfig& w : portfolio) w.validate();
  const auto started = std::chrono::steady_clock::now();
  const Deadline deadline = Deadline::after(options.time_limit);

  PoutineReport report;
  PresolveResult pre;
  try {
    pre = presolve(original);
  } catch (const ProvenInfeasible& e) {
    if (options.log != nullptr) options.log->record(-1, "presolve_infeasible");
    report.proven_infeasible = true;
    report.best_bound = kInf;
    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return report;
  }
  if (options.log != nullptr) options.log->record(-1, "presolved");

  IncumbentStore store(original, pre.record, options.sol_path, options.log);
  const WorkerContext ctx{pre.reduced, store, options.log, deadline};
  report.workers.resize(portfolio.size());
  {
    std::vector<std::jthread> threads;
    threads.reserve(portfolio.size());
    for (std::size_t w = 0; w < portfolio.size(); ++w) {
      threads.emplace_back([&, w] { report.workers[w] = run_worker(portfolio[w], ctx); });
    }
  }

  report.best = store.best();
  for (const WorkerReport& w : report.workers) {
    if (!w.bnb_status) continue;
    if (*w.bnb_status == BnbStatus::Infeasible && !report.best) report.proven_infeasible = true;
    report.best_bound = std::max(report.best_bound, w.lower_bound);
  }
  if (report.best) report.best_bound = std::min(report.best_bound, report.best->objective);
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  if (options.log != nullptr) {
    options.log->record(-1, "done", report.best ? std::optional<double>(report.best->objective) : std::nullopt);
  }
  return report;
}

}  // namespace poutine
