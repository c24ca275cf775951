// SPDX-FileCopyrightText: Copyright (c) 2026 The Poutine Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "poutine/bnb.hpp"
#include "poutine/deadline.hpp"
#include "poutine/diving.hpp"
#include "poutine/fpump.hpp"
#include "poutine/model.hpp"
#include "poutine/presolve.hpp"

namespace poutine {

struct DiveStage {
  DiveRule rule;
  long max_dives = kUnlimitedDives;
};
struct FpStage {
  FPConfig config;
};
struct RlbStage {
  int k = 10;
};
struct RandomStage {
  std::uint64_t seed = 0;
};
struct BnbStage {
  std::uint64_t seed = 0;
};

using Stage = std::variant<DiveStage, FpStage, RlbStage, RandomStage, BnbStage>;

struct WorkerConfig {
  int id = 0;
  std::vector<Stage> stages;

  /// Throws std::invalid_argument unless BnB (when present) is last and every
  /// RLB stage follows a dive or FP stage.
  void validate() const;
  std::string describe() const;
};

/// The eight-thread list: D1+BnB, D2+BnB, D3(100)+RLB+BnB, D3(200)+BnB,
/// FP(.4)+BnB, FP(.9)+RLB+BnB, FP(.4)+RLB+BnB, random instantiation.
/// Shorter counts take a prefix; longer ones cycle. `seed` shifts every seed.
std::vector<WorkerConfig> default_portfolio(int thread_count, std::uint64_t seed = 0);

/// A preset name ("default") or a JSON file describing the workers.
std::vector<WorkerConfig> load_portfolio(std::string_view preset_or_path, int thread_count,
                                         std::uint64_t seed = 0);

std::vector<WorkerConfig> parse_portfolio_json(std::string_view json_text);

// Integer sampling range is capped to [-1e6, 1e6].
inline constexpr double kRandomRangeCap = 1e6;

/// Samples every integer column uniformly over its capped range, solves the
/// LP over the continuous columns, and returns the first feasible point.
std::optional<Solution> random_instantiation(const ProblemInstance& instance, std::mt19937_64& rng,
                                             const Deadline& deadline);

/// `time_s,worker,event,objective` lines. Times have 0.1 s resolution.
class EventLog {
 public:
  EventLog();
  explicit EventLog(const std::filesystem::path& path);

  void record(int worker, std::string_view event, std::optional<double> objective = std::nullopt);
  std::vector<std::string> lines() const;

 private:
  mutable std::mutex mutex_;
  std::chrono::steady_clock::time_point start_;
  std::ofstream file_;
  std::vector<std::string> lines_;
};

/// Shared best solution. Candidates arrive in presolved space; stored
/// solutions are feasible in the original instance and strictly improving.
class IncumbentStore {
 public:
  IncumbentStore(const ProblemInstance& original, const PresolveRecord& record,
                 std::filesystem::path sol_path = {}, EventLog* log = nullptr);

  /// Uncrushes `candidate`; accepts it iff it is feasible in the original
  /// instance and beats the stored objective by more than 1e-9. Accepted
  /// solutions replace the .sol file through a temporary and a rename.
  bool try_update(const Solution& candidate, int worker = -1);

  std::optional<Solution> best() const;
  std::optional<Solution> best_reduced() const;
  std::vector<double> improvements() const;
  int rejected_infeasible() const;

 private:
  void write_sol_file(const Solution& sol) const;

  const ProblemInstance& original_;
  const PresolveRecord& record_;
  std::filesystem::path sol_path_;
  EventLog* log_;
  mutable std::mutex mutex_;
  std::optional<Solution> best_;
  std::optional<Solution> best_reduced_;
  std::vector<double> improvements_;
  int rejected_infeasible_ = 0;
};

struct WorkerReport {
  int worker = 0;
  std::string config;
  std::optional<double> heuristic_objective;  // first feasible find of the worker's own stages
  std::optional<BnbStatus> bnb_status;
  double lower_bound = -kInf;
  long bnb_nodes = 0;
};

struct PoutineReport {
  std::optional<Solution> best;  // original space
  double best_bound = -kInf;
  bool proven_infeasible = false;
  std::vector<WorkerReport> workers;
  double wall_seconds = 0.0;
};

struct RunOptions {
  double time_limit = 600.0;
  std::filesystem::path sol_path;
  EventLog* log = nullptr;
};

/// Presolves once, runs every worker on its own thread over the reduced
/// instance, and returns when all workers are done or the time limit passes.
PoutineReport run_poutine(const ProblemInstance& original, const std::vector<WorkerConfig>& portfolio,
                          const RunOptions& options);

}  // namespace poutine
