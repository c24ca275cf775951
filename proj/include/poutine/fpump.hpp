// SPDX-FileCopyrightText: Copyright (c) 2026 The Poutine Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "poutine/deadline.hpp"
#include "poutine/lp.hpp"
#include "poutine/model.hpp"

namespace poutine {

struct FPConfig {
  double alpha = 0.4;         // weight of the scaled original cost
  long max_iterations = 10;   // nT
  long perturb_period = 20;   // FP_T, also the cycle-detection window
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

/// d_aux >= |x_column - target| for one general-integer column.
struct DistanceAux {
  int column;
  int aux;  // column index of d in the distance model
  double target;
};

/// Convexified distance objective over the columns of the distance model:
/// the instance's n columns followed by one auxiliary per general integer.
struct FpObjective {
  std::vector<double> coefficients;
  double constant = 0.0;
  std::vector<DistanceAux> aux;
};

/// (1 - alpha) * Hamming-style distance to `x_tilde` plus
/// alpha * sqrt(|I|) / (||c|| + [||c|| == 0]) * c'x.
/// Throws std::invalid_argument when `x_tilde` is fractional on an integer
/// column.
FpObjective fp_objective(std::span<const double> x_tilde, double alpha,
                         const ProblemInstance& instance);

/// The instance extended with the auxiliary columns and linking rows of
/// `objective`, with `objective` installed as its cost.
ProblemInstance distance_model(const ProblemInstance& instance, const FpObjective& objective);

/// Round-half-up on integer columns; continuous entries pass through.
std::vector<double> round_point(std::span<const double> point, std::span<const VarClass> classes);

/// Flips the binaries farthest from the last LP point and nudges general
/// integers toward it. Always changes at least one entry when any integer
/// column can move.
std::vector<double> perturb(std::span<const double> x_tilde, std::span<const double> last_lp_point,
                            const ProblemInstance& instance, std::mt19937_64& rng);

struct FPOutcome {
  std::optional<Solution> solution;
  std::vector<double> x_tilde;   // last rounded point; empty if the root LP failed
  std::vector<double> lp_point;  // last LP point over the instance columns
  long iterations = 0;
};

FPOutcome run_fp(const ProblemInstance& instance, const FPConfig& config,
                 const Deadline& deadline = Deadline::never());

}  // namespace poutine
