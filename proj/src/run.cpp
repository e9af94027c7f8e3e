#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "finito/solvers.hpp"

namespace finito {
namespace {

std::int64_t now_ns() {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

bool is_finito_family(SolverKind kind) {
  return kind == SolverKind::Finito || kind == SolverKind::ProxFinito ||
         kind == SolverKind::Miso;
}

SolverState initial_state(const FiniteSumProblem& problem, const SolverConfig& config) {
  const Vector w0 = config.w0.value_or(Vector::Zero(problem.d()));
  const bool lazy = config.init == Initialization::FirstPass;
  switch (config.solver) {
    case SolverKind::Finito:
      return lazy ? finito_init_lazy(problem, config.alpha, w0, config.audit)
                  : finito_init(problem, config.alpha, w0, config.audit);
    case SolverKind::ProxFinito:
      return lazy ? prox_finito_init_lazy(problem, config.alpha, w0)
                  : prox_finito_init(problem, config.alpha, w0);
    case SolverKind::Miso:
      return lazy ? miso_init_lazy(problem, w0, config.audit)
                  : miso_init(problem, w0, config.audit);
    case SolverKind::Sag: {
      const double step =
          config.step.value_or(sag_default_step(problem, config.sag_practical_step));
      return lazy ? sag_init_lazy(problem, step, w0) : sag_init(problem, step, w0);
    }
    case SolverKind::FullGradient:
      return full_gradient_init(
          problem, config.step.value_or(1.0 / problem.lipschitz_constant()), w0);
  }
  throw InvalidArgument("unknown solver");
}

void validate(const FiniteSumProblem& problem, const SolverConfig& config) {
  if (config.epochs < 0) throw InvalidArgument("epochs must be >= 0");
  if (config.record_every < 0) throw InvalidArgument("record_every must be >= 0");
  if (config.trace_point == TracePoint::PhiMean) {
    const bool audited = config.solver == SolverKind::ProxFinito ||
                         (is_finito_family(config.solver) && config.audit);
    if (!audited)
      throw InvalidArgument("tracing the phi mean needs a Finito-family solver in audit mode");
  }
  if (config.solver != SolverKind::ProxFinito &&
      config.solver != SolverKind::FullGradient && problem.l1_weight() > 0.0)
    throw InvalidArgument("only prox-finito and full-gradient handle an L1 term");
  if (config.solver == SolverKind::FullGradient && config.record_every != 0 &&
      config.record_every % problem.n() != 0)
    throw InvalidArgument("full-gradient records must fall on whole passes");
}

}  // namespace

std::string_view to_string(SolverKind kind) {
  switch (kind) {
    case SolverKind::Finito:
      return "finito";
    case SolverKind::ProxFinito:
      return "prox-finito";
    case SolverKind::Sag:
      return "sag";
    case SolverKind::Miso:
      return "miso";
    case SolverKind::FullGradient:
      return "full-gradient";
  }
  return "unknown";
}

SolverKind parse_solver(std::string_view name) {
  if (name == "finito") return SolverKind::Finito;
  if (name == "prox-finito") return SolverKind::ProxFinito;
  if (name == "sag") return SolverKind::Sag;
  if (name == "miso") return SolverKind::Miso;
  if (name == "full-gradient") return SolverKind::FullGradient;
  throw InvalidArgument("unknown solver '" + std::string(name) + "'");
}

Runner::Runner(const FiniteSumProblem& problem, SolverConfig config,
               const ReferenceSolution* reference)
    : problem_(&problem),
      config_(std::move(config)),
      reference_(reference),
      state_((validate(problem, config_), initial_state(problem, config_))),
      sampler_(config_.sampling, problem.n()),
      start_ns_(now_ns()) {}

Runner::Runner(const FiniteSumProblem& problem, SolverConfig config,
               const ReferenceSolution* reference, SolverState state,
               std::uint64_t steps, std::uint64_t sampler_draws)
    : problem_(&problem),
      config_(std::move(config)),
      reference_(reference),
      state_(std::move(state)),
      sampler_(config_.sampling, problem.n(), sampler_draws),
      steps_(steps),
      start_ns_(now_ns()) {
  validate(problem, config_);
}

Index Runner::next_index() {
  const auto n = static_cast<std::uint64_t>(problem_->n());
  if (config_.init == Initialization::FirstPass && steps_ < n)
    return static_cast<Index>(steps_);
  return sampler_.next();
}

void Runner::step() {
  if (auto* full = std::get_if<FullGradientState>(&state_)) {
    full_gradient_step(*full, *problem_);
    steps_ += static_cast<std::uint64_t>(problem_->n());
    return;
  }
  const Index j = next_index();
  if (auto* sag = std::get_if<SagState>(&state_)) {
    sag_step(*sag, *problem_, j);
  } else {
    auto& finito = std::get<FinitoState>(state_);
    switch (finito.variant) {
      case FinitoVariant::Finito:
        finito_step(finito, *problem_, j);
        break;
      case FinitoVariant::ProxFinito:
        prox_finito_step(finito, *problem_, j);
        break;
      case FinitoVariant::Miso:
        miso_step(finito, *problem_, j);
        break;
    }
  }
  ++steps_;
}

void Runner::advance_to(std::uint64_t target) {
  while (steps_ < target) step();
}

Vector Runner::iterate() const {
  return std::visit([](const auto& s) -> Vector { return s.w; }, state_);
}

Vector Runner::trace_point() const {
  if (config_.trace_point == TracePoint::PhiMean)
    return std::get<FinitoState>(state_).phi_mean();
  return iterate();
}

TraceRecord Runner::record() const {
  const Vector point = trace_point();
  TraceRecord rec;
  rec.epoch = static_cast<double>(steps_) / static_cast<double>(problem_->n());
  if (point.allFinite()) {
    rec.objective = problem_->full_objective(point);
    rec.grad_norm = stationarity(*problem_, point);
  } else {
    rec.objective = std::numeric_limits<double>::infinity();
    rec.grad_norm = std::numeric_limits<double>::infinity();
  }
  rec.suboptimality = reference_ != nullptr
                          ? rec.objective - reference_->f_star
                          : std::numeric_limits<double>::quiet_NaN();
  rec.wall_ms = elapsed_offset_ms_ + static_cast<double>(now_ns() - start_ns_) * 1e-6;
  rec.solver = std::string(to_string(config_.solver));
  rec.sampling = std::string(to_string(config_.sampling));
  rec.seed = config_.sampling.seed;
  return rec;
}

std::vector<TraceRecord> continue_run(Runner& runner) {
  const auto n = static_cast<std::uint64_t>(runner.problem().n());
  const std::uint64_t interval =
      runner.config().record_every > 0
          ? static_cast<std::uint64_t>(runner.config().record_every)
          : n;
  const std::uint64_t total = static_cast<std::uint64_t>(runner.config().epochs) * n;

  std::vector<TraceRecord> trace;
  trace.push_back(runner.record());
  const double initial_gap = trace.front().suboptimality;
  const double factor = runner.config().divergence_factor;

  while (runner.steps() < total) {
    const std::uint64_t next = std::min(total, (runner.steps() / interval + 1) * interval);
    try {
      runner.advance_to(next);
    } catch (DivergenceError& e) {
      e.partial_trace = trace;
      throw;
    }
    trace.push_back(runner.record());
    const TraceRecord& last = trace.back();
    const bool blown_up = std::isfinite(initial_gap) && initial_gap > 0.0 &&
                          last.suboptimality > factor * initial_gap;
    if (!std::isfinite(last.objective) || blown_up) {
      DivergenceError e("run diverged at epoch " + std::to_string(last.epoch) +
                            " (objective " + std::to_string(last.objective) + ")",
                        -1, runner.steps());
      e.partial_trace = trace;
      throw e;
    }
  }
  return trace;
}

std::vector<TraceRecord> run(const FiniteSumProblem& problem,
                             const SolverConfig& config,
                             const ReferenceSolution* reference) {
  Runner runner(problem, config, reference);
  return continue_run(runner);
}

}  // namespace finito
