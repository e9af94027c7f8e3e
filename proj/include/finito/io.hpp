#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "finito/problem.hpp"
#include "finito/solvers.hpp"
#include "finito/types.hpp"

namespace finito::io {

// ---------------------------------------------------------------------------
// Datasets

struct Dataset {
  Matrix features;
  Vector targets;
  std::string warning;  // non-empty when the dense matrix is unusually large
};

struct LibsvmOptions {
  std::optional<Index> d_hint;
  std::size_t memory_warning_bytes = std::size_t{1} << 30;
};

/// Parses "<label> <idx>:<val> ..." lines (1-based, strictly ascending
/// indices) into a dense matrix. Blank lines and '#' comments are skipped.
Dataset parse_libsvm(std::istream& in, LibsvmOptions options = {});

/// Comma-separated rows "label,x1,...,xd"; '#' lines are skipped.
Dataset parse_csv_dataset(std::istream& in);

/// Maps {0, 1} labels to {-1, +1}; leaves +-1 labels alone.
void normalize_binary_labels(Vector& targets);

struct SynthSpec {
  Index n = 200;
  Index d = 10;
  LossKind loss = LossKind::Logistic;
  double s = 0.01;
  double target_beta = 2.0;
  double noise = 0.1;
  std::uint64_t seed = 1;
  double l1_weight = 0.0;
};

/// "n=200,d=10,beta=2,loss=logistic,s=0.01,noise=0.1,seed=1,l1=0"; unspecified
/// keys keep their defaults.
SynthSpec parse_synth_spec(std::string_view text);

/// Standard normal features rescaled so the big data condition holds at
/// target_beta; targets from a planted weight vector (plus noise, or its sign
/// for logistic loss).
FiniteSumProblem synth_problem(const SynthSpec& spec);

struct SynthResult {
  FiniteSumProblem problem;
  ReferenceSolution reference;
};

SynthResult synth_problem_with_reference(const SynthSpec& spec);

// ---------------------------------------------------------------------------
// Traces

inline constexpr std::string_view kTraceHeader =
    "epoch,objective,suboptimality,grad_norm,wall_ms,solver,sampling,seed";

/// Shortest decimal that parses back to the same double.
std::string format_double(double x);
double parse_double(std::string_view text);

void write_trace(std::ostream& out, const std::vector<TraceRecord>& records);
std::vector<TraceRecord> read_trace(std::istream& in);

// ---------------------------------------------------------------------------
// Checkpoints

inline constexpr int kCheckpointVersion = 1;

/// Everything needed to resume a run at the step it was captured.
struct Checkpoint {
  int format_version = kCheckpointVersion;
  SolverConfig config;  // solver, alpha/step, sampling, init, audit
  std::uint64_t steps = 0;
  std::uint64_t sampler_draws = 0;
  SolverState state;
};

Checkpoint capture(const Runner& runner);

/// Rebuilds a runner; `config` supplies run-length and trace settings while
/// the solver, sampling and initialization come from the checkpoint.
Runner resume(const FiniteSumProblem& problem, const Checkpoint& checkpoint,
              SolverConfig config, const ReferenceSolution* reference = nullptr);

std::string format_hex(double x);
double parse_hex(std::string_view text);

void checkpoint_save(std::ostream& out, const Checkpoint& checkpoint);
Checkpoint checkpoint_load(std::istream& in, const FiniteSumProblem& problem);

}  // namespace finito::io
