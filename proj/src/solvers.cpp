#include "finito/solvers.hpp"

#include <string>

namespace finito {
namespace {

void require_strongly_convex(const FiniteSumProblem& problem) {
  if (!(problem.s() > 0.0)) throw StrongConvexityRequired();
}

void require_point(const FiniteSumProblem& problem, const Vector& w0) {
  if (w0.size() != problem.d())
    throw InvalidArgument("initial point has dimension " +
                          std::to_string(w0.size()) + ", expected " +
                          std::to_string(problem.d()));
  if (!w0.allFinite()) throw InvalidArgument("initial point is not finite");
}

void require_component(Index j, Index n) {
  if (j < 0 || j >= n)
    throw InvalidArgument("component index " + std::to_string(j) +
                          " out of range [0, " + std::to_string(n) + ")");
}

FinitoState empty_state(const FiniteSumProblem& problem, FinitoVariant variant,
                        double alpha, const Vector& w0, bool audit) {
  require_strongly_convex(problem);
  require_point(problem, w0);
  if (!(alpha > 0.0)) throw InvalidArgument("alpha must be positive");
  const Index n = problem.n();
  const Index d = problem.d();
  FinitoState state;
  state.variant = variant;
  state.alpha = alpha;
  state.s = problem.s();
  state.l1_weight = variant == FinitoVariant::ProxFinito ? problem.l1_weight() : 0.0;
  state.p_table = Matrix::Zero(n, d);
  state.p_sum = Vector::Zero(d);
  state.w = w0;
  state.audit = audit;
  if (audit) {
    state.phi_table = Matrix::Zero(n, d);
    state.grad_table = Matrix::Zero(n, d);
  }
  state.seen.assign(static_cast<std::size_t>(n), 0);
  return state;
}

// w = -(1/(alpha s m)) sum p_i, then the prox for the proximal variant.
void recompute_iterate(FinitoState& state) {
  if (state.seen_count == 0) return;
  const double scale =
      -1.0 / (state.alpha * state.s * static_cast<double>(state.seen_count));
  Vector z = scale * state.p_sum;
  if (state.variant == FinitoVariant::ProxFinito)
    state.w = prox_operator(state.l1_weight, z, 1.0 / (state.alpha * state.s));
  else
    state.w = std::move(z);
}

FinitoState filled_state(const FiniteSumProblem& problem, FinitoVariant variant,
                         double alpha, const Vector& w0, bool audit) {
  FinitoState state = empty_state(problem, variant, alpha, w0, audit);
  Vector g;
  for (Index i = 0; i < problem.n(); ++i) {
    problem.component_gradient(i, w0, g);
    state.p_table.row(i) = (g - alpha * state.s * w0).transpose();
    if (audit) {
      state.phi_table.row(i) = w0.transpose();
      state.grad_table.row(i) = g.transpose();
    }
  }
  std::fill(state.seen.begin(), state.seen.end(), std::uint8_t{1});
  state.seen_count = problem.n();
  finito_refresh(state);
  return state;
}

void advance(FinitoState& state, const FiniteSumProblem& problem, Index j) {
  require_component(j, state.n());
  if (problem.n() != state.n() || problem.d() != state.d())
    throw InvalidArgument("state and problem dimensions differ");
  Vector g;
  problem.component_gradient(j, state.w, g);
  if (!g.allFinite())
    throw DivergenceError("non-finite gradient at component " +
                              std::to_string(j) + ", step " +
                              std::to_string(state.k),
                          j, state.k);
  const double as = state.alpha * state.s;
  Vector p = g - as * state.w;
  state.p_sum += p - state.p_table.row(j).transpose();
  state.p_table.row(j) = p.transpose();
  if (state.audit) {
    state.phi_table.row(j) = state.w.transpose();
    state.grad_table.row(j) = g.transpose();
  }
  if (!state.seen[static_cast<std::size_t>(j)]) {
    state.seen[static_cast<std::size_t>(j)] = 1;
    ++state.seen_count;
  }
  ++state.k;
  if (state.k % static_cast<std::uint64_t>(state.n()) == 0)
    state.p_sum = state.p_table.colwise().sum().transpose();
  recompute_iterate(state);
  if (!state.w.allFinite())
    throw DivergenceError("iterate became non-finite at component " +
                              std::to_string(j) + ", step " +
                              std::to_string(state.k),
                          j, state.k);
}

}  // namespace

Vector FinitoState::phi_mean() const {
  if (!audit) throw InvalidArgument("phi table is only kept in audit mode");
  if (seen_count == 0) return w;
  return phi_table.colwise().sum().transpose() / static_cast<double>(seen_count);
}

void finito_refresh(FinitoState& state) {
  state.p_sum = state.p_table.colwise().sum().transpose();
  recompute_iterate(state);
}

FinitoState finito_init(const FiniteSumProblem& problem, double alpha,
                        const Vector& w0, bool audit) {
  return filled_state(problem, FinitoVariant::Finito, alpha, w0, audit);
}

FinitoState finito_init_lazy(const FiniteSumProblem& problem, double alpha,
                             const Vector& w0, bool audit) {
  return empty_state(problem, FinitoVariant::Finito, alpha, w0, audit);
}

FinitoState finito_from_table(const FiniteSumProblem& problem, double alpha,
                              const Matrix& phi_table) {
  if (phi_table.rows() != problem.n() || phi_table.cols() != problem.d())
    throw InvalidArgument("phi table must be n x d");
  FinitoState state =
      empty_state(problem, FinitoVariant::Finito, alpha, Vector::Zero(problem.d()), true);
  Vector g;
  for (Index i = 0; i < problem.n(); ++i) {
    const Vector phi = phi_table.row(i).transpose();
    problem.component_gradient(i, phi, g);
    state.phi_table.row(i) = phi.transpose();
    state.grad_table.row(i) = g.transpose();
    state.p_table.row(i) = (g - alpha * state.s * phi).transpose();
  }
  std::fill(state.seen.begin(), state.seen.end(), std::uint8_t{1});
  state.seen_count = problem.n();
  finito_refresh(state);
  return state;
}

void finito_step(FinitoState& state, const FiniteSumProblem& problem, Index j) {
  if (state.variant == FinitoVariant::ProxFinito)
    throw InvalidArgument("proximal state must be advanced with prox_finito_step");
  advance(state, problem, j);
}

void finito_first_pass_step(FinitoState& state, const FiniteSumProblem& problem,
                            Index k) {
  if (k >= state.n())
    throw InvalidArgument("first pass is over: k = " + std::to_string(k) +
                          " >= n = " + std::to_string(state.n()));
  if (k != state.seen_count || state.seen[static_cast<std::size_t>(k)])
    throw InvalidArgument("first pass processes components in index order; expected " +
                          std::to_string(state.seen_count) + ", got " +
                          std::to_string(k));
  advance(state, problem, k);
}

FinitoState prox_finito_init(const FiniteSumProblem& problem, double alpha,
                             const Vector& w0) {
  return filled_state(problem, FinitoVariant::ProxFinito, alpha, w0, true);
}

FinitoState prox_finito_init_lazy(const FiniteSumProblem& problem, double alpha,
                                  const Vector& w0) {
  return empty_state(problem, FinitoVariant::ProxFinito, alpha, w0, true);
}

void prox_finito_step(FinitoState& state, const FiniteSumProblem& problem, Index j) {
  if (state.variant != FinitoVariant::ProxFinito)
    throw InvalidArgument("prox_finito_step needs a state from prox_finito_init");
  if (!state.audit) throw InvalidArgument("proximal Finito runs in audit mode");
  advance(state, problem, j);
}

FinitoState miso_init(const FiniteSumProblem& problem, const Vector& w0, bool audit) {
  require_strongly_convex(problem);
  return filled_state(problem, FinitoVariant::Miso,
                      problem.lipschitz_constant() / problem.s(), w0, audit);
}

FinitoState miso_init_lazy(const FiniteSumProblem& problem, const Vector& w0,
                           bool audit) {
  require_strongly_convex(problem);
  return empty_state(problem, FinitoVariant::Miso,
                     problem.lipschitz_constant() / problem.s(), w0, audit);
}

void miso_step(FinitoState& state, const FiniteSumProblem& problem, Index j) {
  if (state.variant != FinitoVariant::Miso)
    throw InvalidArgument("miso_step needs a state from miso_init");
  advance(state, problem, j);
}

double sag_default_step(const FiniteSumProblem& problem, bool practical) {
  const double ln = problem.lipschitz_constant() * static_cast<double>(problem.n());
  return practical ? 1.0 / ln : 1.0 / (16.0 * ln);
}

SagState sag_init_lazy(const FiniteSumProblem& problem, double step,
                       const Vector& w0) {
  require_point(problem, w0);
  if (!(step > 0.0)) throw InvalidArgument("SAG step must be positive");
  SagState state;
  state.step = step;
  state.grad_table = Matrix::Zero(problem.n(), problem.d());
  state.grad_sum = Vector::Zero(problem.d());
  state.w = w0;
  state.seen.assign(static_cast<std::size_t>(problem.n()), 0);
  return state;
}

SagState sag_init(const FiniteSumProblem& problem, double step, const Vector& w0) {
  SagState state = sag_init_lazy(problem, step, w0);
  Vector g;
  for (Index i = 0; i < problem.n(); ++i) {
    problem.component_gradient(i, w0, g);
    state.grad_table.row(i) = g.transpose();
  }
  state.grad_sum = state.grad_table.colwise().sum().transpose();
  std::fill(state.seen.begin(), state.seen.end(), std::uint8_t{1});
  state.seen_count = problem.n();
  return state;
}

void sag_step(SagState& state, const FiniteSumProblem& problem, Index j) {
  require_component(j, state.n());
  Vector g;
  problem.component_gradient(j, state.w, g);
  if (!g.allFinite())
    throw DivergenceError("non-finite gradient at component " +
                              std::to_string(j) + ", step " +
                              std::to_string(state.k),
                          j, state.k);
  state.grad_sum += g - state.grad_table.row(j).transpose();
  state.grad_table.row(j) = g.transpose();
  if (!state.seen[static_cast<std::size_t>(j)]) {
    state.seen[static_cast<std::size_t>(j)] = 1;
    ++state.seen_count;
  }
  ++state.k;
  if (state.k % static_cast<std::uint64_t>(state.n()) == 0)
    state.grad_sum = state.grad_table.colwise().sum().transpose();
  const double scale = static_cast<double>(state.n()) /
                       static_cast<double>(state.seen_count);
  if (state.seen_count == state.n())
    state.w -= state.step * state.grad_sum;
  else
    state.w -= (state.step * scale) * state.grad_sum;
  if (!state.w.allFinite())
    throw DivergenceError("iterate became non-finite at component " +
                              std::to_string(j) + ", step " +
                              std::to_string(state.k),
                          j, state.k);
}

FullGradientState full_gradient_init(const FiniteSumProblem& problem,
                                     double step, const Vector& w0) {
  require_point(problem, w0);
  if (!(step > 0.0)) throw InvalidArgument("gradient step must be positive");
  return FullGradientState{.step = step, .k = 0, .w = w0};
}

void full_gradient_step(FullGradientState& state, const FiniteSumProblem& problem) {
  const Vector g = problem.full_gradient(state.w);
  Vector z = state.w - state.step * g;
  state.w = prox_operator(problem.l1_weight(), z, state.step);
  ++state.k;
  if (!state.w.allFinite())
    throw DivergenceError("iterate became non-finite at iteration " +
                              std::to_string(state.k),
                          -1, state.k);
}

}  // namespace finito
