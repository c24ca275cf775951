// SPDX-FileCopyrightText: Copyright (c) 2026 The Poutine Authors
// SPDX-License-Identifier: Apache-2.0

// Checks a .sol file against an instance: prints objective and worst
// violation, exits 0 iff the assignment is feasible.

#include <cstdio>
#include <fstream>
#include <sstream>

#include "poutine/model.hpp"

int main(int argc, char** argv) {
  if (argc != 3) {
    std::fprintf(stderr, "usage: %s <instance.mps[.gz]> <solution.sol>\n", argv[0]);
    return 4;
  }
  try {
    const poutine::ProblemInstance inst = poutine::read_mps_file(argv[1]);
    std::ifstream in(argv[2]);
    if (!in) {
      std::fprintf(stderr, "cannot open %s\n", argv[2]);
      return 4;
    }
    std::stringstream buf;
    buf << in.rdbuf();
    const auto sol = poutine::evaluate(inst, poutine::parse_sol(buf.str(), inst));
    std::printf("objective %s\nmax_violation %g\n%s\n", poutine::format_double(sol.objective).c_str(),
                sol.max_violation, sol.feasible() ? "feasible" : "infeasible");
    return sol.feasible() ? 0 : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  }
}
