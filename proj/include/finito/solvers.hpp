#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "finito/problem.hpp"
#include "finito/sampler.hpp"
#include "finito/types.hpp"

namespace finito {

/// One row of convergence telemetry.
struct TraceRecord {
  double epoch = 0.0;          // fractional passes
  double objective = 0.0;
  double suboptimality = 0.0;  // NaN when no reference is known
  double grad_norm = 0.0;
  double wall_ms = 0.0;
  std::string solver;
  std::string sampling;
  std::uint64_t seed = 0;
};

/// A step produced a non-finite value, or a run blew up past the divergence
/// threshold. `partial_trace` holds whatever was recorded before the abort.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, Index component, std::uint64_t step)
      : Error(what), component_(component), step_(step) {}

  Index component() const { return component_; }
  std::uint64_t step() const { return step_; }

  std::vector<TraceRecord> partial_trace;

 private:
  Index component_;
  std::uint64_t step_;
};

enum class FinitoVariant { Finito, ProxFinito, Miso };

/// Tables for Finito and its relatives.
///
/// Compact storage keeps p_i = f_i'(phi_i) - alpha s phi_i and recovers
///   w = -(1 / (alpha s m)) sum_i p_i,
/// where m is the number of components seen so far (m = n once every row is
/// known). Audit mode additionally keeps the explicit phi_i and f_i'(phi_i)
/// rows. Rows of components that have not been seen are zero.
struct FinitoState {
  FinitoVariant variant = FinitoVariant::Finito;
  double alpha = 2.0;
  double s = 0.0;
  double l1_weight = 0.0;  // ProxFinito only
  std::uint64_t k = 0;
  Matrix p_table;
  Vector p_sum;
  Vector w;
  bool audit = false;
  Matrix phi_table;   // audit mode only
  Matrix grad_table;  // audit mode only
  std::vector<std::uint8_t> seen;
  Index seen_count = 0;

  Index n() const { return p_table.rows(); }
  Index d() const { return p_table.cols(); }
  /// Mean of the phi rows seen so far (audit mode).
  Vector phi_mean() const;
};

/// All phi_i = w0, every table row filled, w at the Finito map of the table.
FinitoState finito_init(const FiniteSumProblem& problem, double alpha,
                        const Vector& w0, bool audit = false);

/// No rows known yet and w = w0. Steps on unseen components average only over
/// the seen rows until every component has been touched.
FinitoState finito_init_lazy(const FiniteSumProblem& problem, double alpha,
                             const Vector& w0, bool audit = false);

/// Audit state with an explicit phi table; w is the Finito map of the table.
FinitoState finito_from_table(const FiniteSumProblem& problem, double alpha,
                              const Matrix& phi_table);

/// Sets phi_j <- w, stores f_j'(w), recomputes w and advances k.
void finito_step(FinitoState& state, const FiniteSumProblem& problem, Index j);

/// Pass-one rule: component k (processed in index order) joins the table and
/// w becomes the Finito map over the k+1 rows seen so far.
void finito_first_pass_step(FinitoState& state, const FiniteSumProblem& problem,
                            Index k);

/// Audit-mode proximal Finito. w = prox_{lambda/(alpha s)}(Finito map).
FinitoState prox_finito_init(const FiniteSumProblem& problem, double alpha,
                             const Vector& w0);
FinitoState prox_finito_init_lazy(const FiniteSumProblem& problem, double alpha,
                                  const Vector& w0);
void prox_finito_step(FinitoState& state, const FiniteSumProblem& problem, Index j);

/// MISO: Finito with alpha = L / s.
FinitoState miso_init(const FiniteSumProblem& problem, const Vector& w0,
                      bool audit = false);
FinitoState miso_init_lazy(const FiniteSumProblem& problem, const Vector& w0,
                           bool audit = false);
void miso_step(FinitoState& state, const FiniteSumProblem& problem, Index j);

/// Recomputes p_sum from the table and w from p_sum.
void finito_refresh(FinitoState& state);

struct SagState {
  double step = 0.0;
  std::uint64_t k = 0;
  Matrix grad_table;
  Vector grad_sum;
  Vector w;
  std::vector<std::uint8_t> seen;
  Index seen_count = 0;

  Index n() const { return grad_table.rows(); }
  Index d() const { return grad_table.cols(); }
};

/// 1/(16 L n), or 1/(L n) for the practical variant.
double sag_default_step(const FiniteSumProblem& problem, bool practical = false);

SagState sag_init(const FiniteSumProblem& problem, double step, const Vector& w0);
SagState sag_init_lazy(const FiniteSumProblem& problem, double step,
                       const Vector& w0);

/// Replaces row j with f_j'(w), then w <- w - step (n/m) sum_i grad_i with m the
/// number of rows seen (m = n once the table is full).
void sag_step(SagState& state, const FiniteSumProblem& problem, Index j);

/// Plain (proximal) gradient descent; one iteration costs a full pass.
struct FullGradientState {
  double step = 0.0;
  std::uint64_t k = 0;
  Vector w;
};

FullGradientState full_gradient_init(const FiniteSumProblem& problem,
                                     double step, const Vector& w0);
void full_gradient_step(FullGradientState& state, const FiniteSumProblem& problem);

// ---------------------------------------------------------------------------
// Driver

enum class SolverKind { Finito, ProxFinito, Sag, Miso, FullGradient };

std::string_view to_string(SolverKind kind);
SolverKind parse_solver(std::string_view name);

enum class Initialization {
  AllEqual,   // every phi_i = w0 and all tables filled up front
  FirstPass,  // first pass in index order, averaging over seen rows only
};

enum class TracePoint {
  Iterate,  // objective at w
  PhiMean,  // objective at the mean of the phi table (Finito family, audit)
};

struct SolverConfig {
  SolverKind solver = SolverKind::Finito;
  double alpha = 2.0;
  std::optional<double> step;  // SAG and full-gradient; defaults per solver
  bool sag_practical_step = false;
  SamplingScheme sampling;
  long epochs = 10;
  bool audit = false;
  Initialization init = Initialization::FirstPass;
  TracePoint trace_point = TracePoint::Iterate;
  long record_every = 0;  // steps between records; 0 means one pass
  std::optional<Vector> w0;
  double divergence_factor = 1e6;
};

using SolverState = std::variant<FinitoState, SagState, FullGradientState>;

/// Stepwise execution of one configured run. run() is a thin loop over this;
/// checkpointing captures (steps, sampler draws, solver state).
class Runner {
 public:
  Runner(const FiniteSumProblem& problem, SolverConfig config,
         const ReferenceSolution* reference = nullptr);
  /// Resumes from previously captured state.
  Runner(const FiniteSumProblem& problem, SolverConfig config,
         const ReferenceSolution* reference, SolverState state,
         std::uint64_t steps, std::uint64_t sampler_draws);

  /// Advances by one component step (a full-gradient iteration counts as n).
  void step();
  /// Runs until `target` steps have been taken.
  void advance_to(std::uint64_t target);

  TraceRecord record() const;

  std::uint64_t steps() const { return steps_; }
  const SolverState& state() const { return state_; }
  const Sampler& sampler() const { return sampler_; }
  const SolverConfig& config() const { return config_; }
  const FiniteSumProblem& problem() const { return *problem_; }
  /// Point the trace measures (w or the phi mean).
  Vector trace_point() const;
  Vector iterate() const;

 private:
  Index next_index();

  const FiniteSumProblem* problem_;
  SolverConfig config_;
  const ReferenceSolution* reference_;
  SolverState state_;
  Sampler sampler_;
  std::uint64_t steps_ = 0;
  double elapsed_offset_ms_ = 0.0;
  std::int64_t start_ns_ = 0;
};

/// Executes the configured run and returns one record per interval, starting
/// with the initial state. Throws DivergenceError (with the partial trace) if
/// a step goes non-finite or suboptimality exceeds divergence_factor times its
/// initial value.
std::vector<TraceRecord> run(const FiniteSumProblem& problem,
                             const SolverConfig& config,
                             const ReferenceSolution* reference = nullptr);

/// Continues `runner` through config().epochs passes, recording like run().
/// The first record emitted is at the runner's current position.
std::vector<TraceRecord> continue_run(Runner& runner);

}  // namespace finito
