// SPDX-FileCopyrightText: Copyright (c) 2026 The Poutine Authors
// SPDX-License-Identifier: Apache-2.0

#include <CLI11.hpp>
#include <cstdio>
#include <exception>
#include <memory>

#include "poutine/model.hpp"
#include "poutine/orchestrator.hpp"

namespace {

// Exit codes.
constexpr int kFound = 0;
constexpr int kNoneFound = 2;
constexpr int kInfeasible = 3;
constexpr int kInputError = 4;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"poutine: parallel primal-heuristic MILP solver"};
  std::string instance_path;
  double time_limit = 600.0;
  int threads = 8;
  std::uint64_t seed = 0;
  std::string output;
  std::string portfolio = "default";
  std::string log_path;
  app.add_option("instance", instance_path, "MPS instance (.mps or .mps.gz)")->required();
  app.add_option("--time-limit", time_limit, "Wall-clock limit in seconds")->check(CLI::PositiveNumber);
  app.add_option("--threads", threads, "Number of workers")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "Offset added to every worker seed");
  app.add_option("--output", output, "Path of the .sol file");
  app.add_option("--portfolio", portfolio, "Preset name or JSON portfolio file");
  app.add_option("--log", log_path, "Event log (time_s,worker,event,objective)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kInputError;
  }

  poutine::ProblemInstance instance;
  std::vector<poutine::WorkerConfig> workers;
  std::unique_ptr<poutine::EventLog> log;
  try {
    instance = poutine::read_mps_file(instance_path);
    workers = poutine::load_portfolio(portfolio, threads, seed);
    log = log_path.empty() ? std::make_unique<poutine::EventLog>()
                           : std::make_unique<poutine::EventLog>(log_path);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kInputError;
  }

  const auto s = poutine::stats(instance);
  std::printf("instance %s: %d columns (%d binary, %d integer, %d continuous), %d rows\n",
              instance.name.c_str(), s.vars, s.binaries, s.general_integers, s.continuous, s.rows);
  for (const auto& w : workers) std::printf("worker %d: %s\n", w.id, w.describe().c_str());

  poutine::RunOptions opts;
  opts.time_limit = time_limit;
  opts.sol_path = output;
  opts.log = log.get();
  const poutine::PoutineReport report = poutine::run_poutine(instance, workers, opts);

  if (report.proven_infeasible) {
    std::printf("status: infeasible\n");
    return kInfeasible;
  }
  if (!report.best) {
    std::printf("status: no feasible solution within %.1f s\n", time_limit);
    return kNoneFound;
  }
  std::printf("status: feasible\nbest objective: %s\nbest bound: %s\n",
              poutine::format_double(report.best->objective).c_str(),
              poutine::format_double(report.best_bound).c_str());
  return kFound;
}
