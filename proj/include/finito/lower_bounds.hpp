#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "finito/problem.hpp"
#include "finito/solvers.hpp"
#include "finito/types.hpp"

namespace finito::lower_bounds {

/// f_i(w) = (n/2)(w_i - 1)^2 + (1/2)||w||^2 in R^n, realized as a squared-loss
/// problem with rows sqrt(n) e_i, targets sqrt(n) and unit ridge. s = 1 and
/// L = n + 1; w* = (1/2, ..., 1/2), f(w*) = n/4, f(0) = n/2.
FiniteSumProblem make_worst_case(Index n);

/// n (1 - 1/n)^k.
double expected_unseen(Index n, std::uint64_t k);

struct UnseenSummary {
  std::uint64_t k = 0;
  double mean = 0.0;             // E[v^(k)]
  double stderr_mean = 0.0;
  double martingale_mean = 0.0;  // E[(1 - 1/n)^(-k) v^(k)]
  double martingale_stderr = 0.0;
};

/// Monte Carlo of the number of components never drawn after k uniform draws.
UnseenSummary simulate_unseen(Index n, std::uint64_t k, std::uint64_t trials,
                              std::uint64_t seed);

/// Same simulation sampled at several k in one sweep per trial.
std::vector<UnseenSummary> simulate_unseen_curve(Index n,
                                                 std::span<const std::uint64_t> ks,
                                                 std::uint64_t trials,
                                                 std::uint64_t seed);

/// f(w) - f(w*) for w = 1/2 on seen coordinates and 0 on unseen ones; equals
/// (number unseen) / 4.
double oracle_limited_suboptimality(Index n, std::span<const std::uint8_t> seen_mask);

struct FloorMargin {
  double min_slack = 0.0;  // min over steps of (f(w) - f*) - unseen / 4
  std::uint64_t worst_step = 0;
  double floor_at_worst = 0.0;
  double gap_at_worst = 0.0;
};

/// Runs Finito (given alpha) or SAG (step 1/(L n)) from w = 0 with empty
/// tables on make_worst_case(n), drawing components uniformly, and tracks the
/// margin over the oracle-limited floor at every step including step 0.
FloorMargin floor_margin(Index n, SolverKind solver, std::uint64_t steps,
                         std::uint64_t seed, double alpha = 2.0);

}  // namespace finito::lower_bounds
