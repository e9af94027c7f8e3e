#include "finito/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace finito::theory {
namespace {

std::string describe(double a, double b) {
  std::ostringstream out;
  out.precision(17);
  out << "a=" << a << " b=" << b;
  return out.str();
}

double scaled(double tol, double a, double b) {
  return tol * (1.0 + std::max(std::abs(a), std::abs(b)));
}

void require_table(const FiniteSumProblem& problem, const Matrix& phi_table) {
  if (phi_table.rows() != problem.n() || phi_table.cols() != problem.d())
    throw InvalidArgument("phi table must be n x d");
}

void require_audit(const FinitoState& state) {
  if (!state.audit) throw InvalidArgument("check needs an audit-mode state");
  if (state.seen_count != state.n())
    throw InvalidArgument("check needs every table row to be known");
}

Matrix gradient_table(const FiniteSumProblem& problem, const Matrix& phi_table) {
  Matrix grads(problem.n(), problem.d());
  Vector g;
  for (Index i = 0; i < problem.n(); ++i) {
    problem.component_gradient(i, phi_table.row(i).transpose(), g);
    grads.row(i) = g.transpose();
  }
  return grads;
}

// Sums over i of quantities comparing w to the table.
struct TableStats {
  Vector phibar;
  double spread_w = 0.0;     // sum ||w - phi_i||^2
  double spread_bar = 0.0;   // sum ||phibar - phi_i||^2
  double grad_gap = 0.0;     // sum ||f_i'(w) - f_i'(phi_i)||^2
  double grad_inner = 0.0;   // sum <f_i'(w) - f_i'(phi_i), w - phi_i>
};

TableStats table_stats(const FiniteSumProblem& problem, const Matrix& phi_table,
                       const Matrix& grads, const Vector& w) {
  TableStats st;
  st.phibar = phi_table.colwise().mean().transpose();
  Vector gw;
  for (Index i = 0; i < problem.n(); ++i) {
    const Vector phi = phi_table.row(i).transpose();
    problem.component_gradient(i, w, gw);
    const Vector dg = gw - grads.row(i).transpose();
    st.spread_w += (w - phi).squaredNorm();
    st.spread_bar += (st.phibar - phi).squaredNorm();
    st.grad_gap += dg.squaredNorm();
    st.grad_inner += dg.dot(w - phi);
  }
  return st;
}

}  // namespace

CheckReport inequality_report(std::string name, double lhs, double rhs,
                              double tolerance, std::string context) {
  CheckReport r;
  r.name = std::move(name);
  r.lhs = lhs;
  r.rhs = rhs;
  r.slack = rhs - lhs;
  r.tolerance = tolerance;
  r.satisfied = r.slack >= -tolerance;
  r.context = std::move(context);
  return r;
}

CheckReport equality_report(std::string name, double a, double b,
                            double tolerance, std::string context) {
  if (context.empty()) context = describe(a, b);
  return inequality_report(std::move(name), std::abs(a - b), 0.0, tolerance,
                           std::move(context));
}

Vector finito_map(const FiniteSumProblem& problem, const Matrix& phi_table,
                  double alpha) {
  require_table(problem, phi_table);
  if (!(problem.s() > 0.0)) throw StrongConvexityRequired();
  const Matrix grads = gradient_table(problem, phi_table);
  const auto n = static_cast<double>(problem.n());
  return phi_table.colwise().mean().transpose() -
         grads.colwise().sum().transpose() / (alpha * problem.s() * n);
}

LyapunovTerms lyapunov_evaluate(const FiniteSumProblem& problem,
                                const Matrix& phi_table, const Vector& w) {
  require_table(problem, phi_table);
  const auto n = static_cast<double>(problem.n());
  const double s = problem.s();
  const Vector phibar = phi_table.colwise().mean().transpose();

  double values = 0.0;
  double inner = 0.0;
  double spread_w = 0.0;
  double spread_bar = 0.0;
  Vector g;
  for (Index i = 0; i < problem.n(); ++i) {
    const Vector phi = phi_table.row(i).transpose();
    problem.component_gradient(i, phi, g);
    values += problem.component_value(i, phi);
    inner += g.dot(w - phi);
    spread_w += (w - phi).squaredNorm();
    spread_bar += (phibar - phi).squaredNorm();
  }

  LyapunovTerms t;
  t.t1 = problem.smooth_objective(phibar);
  t.t2 = -values / n - inner / n;
  t.t3 = -s / (2.0 * n) * spread_w;
  t.t4 = s / (2.0 * n) * spread_bar;
  t.total = t.t1 + t.t2 + t.t3 + t.t4;
  return t;
}

double initial_lyapunov(const FiniteSumProblem& problem, const Vector& phi0,
                        double alpha) {
  if (!(problem.s() > 0.0)) throw StrongConvexityRequired();
  if (!(alpha > 0.0)) throw InvalidArgument("alpha must be positive");
  const double c = 1.0 - 1.0 / (2.0 * alpha);
  return c / (alpha * problem.s()) * problem.full_gradient(phi0).squaredNorm();
}

bool admissible_parameters(double alpha, double beta) {
  if (!(alpha > 0.0) || !(beta > 0.0))
    throw InvalidArgument("alpha and beta must be positive");
  const double lead = 2.0 / alpha - 1.0 / (alpha * alpha) - beta + beta / alpha;
  return lead <= 0.0 && alpha >= 2.0 && beta >= 2.0;
}

LyapunovTerms expected_next_lyapunov(const FiniteSumProblem& problem,
                                     const FinitoState& state) {
  require_audit(state);
  LyapunovTerms mean;
  for (Index j = 0; j < problem.n(); ++j) {
    FinitoState next = state;
    finito_step(next, problem, j);
    const LyapunovTerms t = lyapunov_evaluate(problem, next.phi_table, next.w);
    mean.t1 += t.t1;
    mean.t2 += t.t2;
    mean.t3 += t.t3;
    mean.t4 += t.t4;
    mean.total += t.total;
  }
  const auto n = static_cast<double>(problem.n());
  mean.t1 /= n;
  mean.t2 /= n;
  mean.t3 /= n;
  mean.t4 /= n;
  mean.total /= n;
  return mean;
}

CheckReport expected_decrease_check(const FiniteSumProblem& problem,
                                    const FinitoState& state, double beta,
                                    double tol) {
  require_audit(state);
  if (!admissible_parameters(state.alpha, beta))
    throw InvalidArgument("expected decrease needs admissible (alpha, beta)");
  if (!big_data_check(problem, beta).verdict)
    throw InvalidArgument("problem does not satisfy the big data condition at beta");
  const double t = lyapunov_evaluate(problem, state.phi_table, state.w).total;
  const double next = expected_next_lyapunov(problem, state).total;
  const double bound = (1.0 - 1.0 / (state.alpha * static_cast<double>(problem.n()))) * t;
  return inequality_report("expected-decrease", next, bound, tol * (std::abs(t) + 1.0),
                           "k=" + std::to_string(state.k) + " T=" + std::to_string(t));
}

CheckReport expected_decrease_check(const FiniteSumProblem& problem,
                                    const Matrix& phi_table, const Vector& w,
                                    double alpha, double beta, double tol) {
  const FinitoState state = finito_from_table(problem, alpha, phi_table);
  const double mismatch = (state.w - w).norm();
  if (mismatch > 1e-8 * (1.0 + w.norm()))
    throw InvalidArgument("w must be the Finito map of the phi table");
  return expected_decrease_check(problem, state, beta, tol);
}

CheckReport bound_gap_check(const FiniteSumProblem& problem,
                            const Matrix& phi_table, const Vector& w, double alpha,
                            const ReferenceSolution& reference, double tol) {
  const Vector mapped = finito_map(problem, phi_table, alpha);
  if ((mapped - w).norm() > 1e-8 * (1.0 + w.norm()))
    throw InvalidArgument("w must be the Finito map of the phi table");
  const Vector phibar = phi_table.colwise().mean().transpose();
  const double gap = problem.smooth_objective(phibar) - reference.f_star;
  const double bound = alpha * lyapunov_evaluate(problem, phi_table, w).total;
  return inequality_report("bound-gap", gap, bound, scaled(tol, gap, bound));
}

std::vector<CheckReport> term_diagnostics(const FiniteSumProblem& problem,
                                          const FinitoState& state, double beta,
                                          double tol) {
  require_audit(state);
  const auto n = static_cast<double>(problem.n());
  const double s = problem.s();
  const double alpha = state.alpha;
  const double lip = problem.lipschitz_constant();
  const Vector& w = state.w;

  const LyapunovTerms now = lyapunov_evaluate(problem, state.phi_table, w);
  const LyapunovTerms next = expected_next_lyapunov(problem, state);
  const TableStats st = table_stats(problem, state.phi_table, state.grad_table, w);
  const Vector grad_w = problem.full_gradient(w);
  const Vector grad_bar = problem.full_gradient(st.phibar);
  const double fw = problem.smooth_objective(w);
  const double n3 = n * n * n;

  const double d1 = next.t1 - now.t1;
  const double d2 = next.t2 - now.t2;
  const double d3 = next.t3 - now.t3;
  const double d4 = next.t4 - now.t4;
  const double scale = tol * (std::abs(now.total) + 1.0);

  const double t1_bound = grad_bar.dot(w - st.phibar) / n + lip / (2.0 * n3) * st.spread_w;
  const double t2_common = -now.t2 / n - fw / n + grad_w.dot(st.phibar - w) / n -
                           st.grad_inner / n3;
  const double t2_exact = t2_common + st.grad_gap / (alpha * s * n3);
  const double t2_stated = t2_common + (1.0 / alpha - beta / n) * st.grad_gap / (s * n3);
  const double t3_common = grad_w.dot(w - st.phibar) / (alpha * n) -
                           st.grad_gap / (2.0 * alpha * alpha * s * n3);
  const double t3_stated = -(1.0 / n + 1.0 / (n * n)) * now.t3 + t3_common;
  const double t3_proof = (0.5 - 1.0 / n) * s / (n * n) * st.spread_w + t3_common;
  const double t4_exact = -s / (2.0 * n * n) * st.spread_bar +
                        s / (2.0 * n) * (st.phibar - w).squaredNorm() -
                        s / (2.0 * n3) * st.spread_w;

  return {
      inequality_report("T1-change-bound", d1, t1_bound, scale),
      equality_report("T2-change-exact", d2, t2_exact, scale),
      inequality_report("T2-change-stated-bound", d2, t2_stated, scale),
      equality_report("T3-change-stated", d3, t3_stated, scale),
      equality_report("T3-change-proof-form", d3, t3_proof, scale),
      equality_report("T4-change", d4, t4_exact, scale),
  };
}

CheckReport expected_step_check(const FiniteSumProblem& problem,
                                const FinitoState& state, double tol) {
  require_audit(state);
  Vector mean = Vector::Zero(problem.d());
  for (Index j = 0; j < problem.n(); ++j) {
    FinitoState next = state;
    finito_step(next, problem, j);
    mean += next.w;
  }
  const auto n = static_cast<double>(problem.n());
  mean /= n;
  const Vector expected =
      state.w - problem.full_gradient(state.w) / (state.alpha * state.s * n);
  const double err = (mean - expected).norm();
  return inequality_report("expected-step", err, 0.0,
                           tol * (1.0 + state.w.norm()),
                           "k=" + std::to_string(state.k));
}

CheckReport variance_decomposition_check(const Matrix& phi_table, const Vector& w,
                                         double tol) {
  const auto n = static_cast<double>(phi_table.rows());
  const Vector phibar = phi_table.colwise().mean().transpose();
  double lhs = 0.0;
  double spread = 0.0;
  for (Index i = 0; i < phi_table.rows(); ++i) {
    lhs += (w - phi_table.row(i).transpose()).squaredNorm();
    spread += (phibar - phi_table.row(i).transpose()).squaredNorm();
  }
  lhs /= n;
  const double rhs = (w - phibar).squaredNorm() + spread / n;
  return equality_report("variance-decomposition", lhs, rhs,
                         tol * (1.0 + std::max(std::abs(lhs), std::abs(rhs))));
}

CheckReport update_identity_check(const FiniteSumProblem& problem,
                                  const FinitoState& state, Index j, double tol) {
  require_audit(state);
  FinitoState next = state;
  finito_step(next, problem, j);
  const auto n = static_cast<double>(problem.n());
  const Vector phi_j = state.phi_table.row(j).transpose();
  const Vector predicted =
      (state.w - phi_j) / n +
      (state.grad_table.row(j).transpose() - problem.component_gradient(j, state.w)) /
          (state.alpha * state.s * n);
  const double err = ((next.w - state.w) - predicted).norm();
  return inequality_report("update-identity", err, 0.0,
                           tol * (1.0 + state.w.norm()),
                           "j=" + std::to_string(j));
}

Vector random_in_ball(rng::Stream& gen, const Vector& center, double radius) {
  const Index d = center.size();
  Vector direction(d);
  double norm = 0.0;
  do {
    for (Index k = 0; k < d; ++k) direction[k] = rng::normal(gen);
    norm = direction.norm();
  } while (norm == 0.0);
  const double r =
      radius * std::pow(rng::uniform01(gen), 1.0 / static_cast<double>(d));
  return center + (r / norm) * direction;
}

Matrix random_phi_table(rng::Stream& gen, Index n, const Vector& center,
                        double radius) {
  Matrix phi(n, center.size());
  for (Index i = 0; i < n; ++i) phi.row(i) = random_in_ball(gen, center, radius).transpose();
  return phi;
}

std::vector<CheckReport> convexity_suite(const FiniteSumProblem& problem,
                                         long draws, double tol,
                                         std::uint64_t seed, const Vector& center,
                                         double radius) {
  if (draws < 1) throw InvalidArgument("draws must be >= 1");
  const Vector origin = center.size() == 0 ? Vector::Zero(problem.d()) : center;
  if (origin.size() != problem.d()) throw InvalidArgument("center has wrong dimension");
  const double lip = problem.lipschitz_constant();
  const double s = problem.s();
  const auto n = static_cast<double>(problem.n());
  rng::Stream gen(seed);

  std::vector<CheckReport> reports;
  reports.reserve(static_cast<std::size_t>(draws) * 7);
  for (long draw = 0; draw < draws; ++draw) {
    const Index i = static_cast<Index>(draw % problem.n());
    const std::string ctx = "draw=" + std::to_string(draw) + " i=" + std::to_string(i);
    const Vector x = random_in_ball(gen, origin, radius);
    const Vector y = random_in_ball(gen, origin, radius);
    const double fx = problem.component_value(i, x);
    const double fy = problem.component_value(i, y);
    const Vector gx = problem.component_gradient(i, x);
    const Vector gy = problem.component_gradient(i, y);
    const double dist2 = (x - y).squaredNorm();
    const double gdist2 = (gx - gy).squaredNorm();
    const double linear = fx + gx.dot(y - x);
    const double gin = (gx - gy).dot(x - y);

    auto push = [&](const char* name, double lhs, double rhs) {
      reports.push_back(inequality_report(name, lhs, rhs, scaled(tol, lhs, rhs), ctx));
    };
    push("B1", fy, linear + 0.5 * lip * dist2);
    push("B2", linear + gdist2 / (2.0 * lip), fy);
    push("B3", linear + 0.5 * s * dist2, fy);
    push("B4", gdist2 / lip, gin);
    push("B5", s * dist2, gin);

    const Vector w = random_in_ball(gen, origin, radius);
    const Matrix phi = random_phi_table(gen, problem.n(), origin, radius);
    const Matrix grads = gradient_table(problem, phi);
    const TableStats st = table_stats(problem, phi, grads, w);
    const double t2 = lyapunov_evaluate(problem, phi, w).t2;
    const double lhs = -problem.smooth_objective(w) - t2;
    push("B6", lhs, -s / (2.0 * n) * st.spread_w);
    push("B7", lhs, -st.grad_gap / (2.0 * lip * n));
  }
  return reports;
}

CheckReport strong_lb_check(const FiniteSumProblem& problem, Index i,
                            const Vector& x, const Vector& y, double tol) {
  const double lip = problem.lipschitz_constant();
  const double s = problem.s();
  if (!(lip > s))
    throw InvalidArgument("strong lower bound needs L > s (L=" + std::to_string(lip) +
                          ", s=" + std::to_string(s) + ")");
  const double fx = problem.component_value(i, x);
  const double fy = problem.component_value(i, y);
  const Vector gx = problem.component_gradient(i, x);
  const Vector gy = problem.component_gradient(i, y);
  const double gap = lip - s;
  const double lower = fy + gy.dot(x - y) + (gx - gy).squaredNorm() / (2.0 * gap) +
                       s * lip / (2.0 * gap) * (y - x).squaredNorm() +
                       s / gap * (gx - gy).dot(y - x);
  return inequality_report("strong-lower-bound", lower, fx, scaled(tol, lower, fx),
                           "i=" + std::to_string(i));
}

CheckReport big_data_lb_check(const FiniteSumProblem& problem,
                              const Matrix& phi_table, const Vector& x,
                              double beta, double tol) {
  require_table(problem, phi_table);
  const BigDataReport report = big_data_check(problem, beta);
  if (!report.verdict)
    throw InvalidArgument("big data condition fails at beta=" + std::to_string(beta) +
                          " (achieved " + std::to_string(report.beta_achieved) + ")");
  const auto n = static_cast<double>(problem.n());
  const double s = problem.s();
  const double lip = report.lipschitz;
  double values = 0.0;
  double linear = 0.0;
  double gap2 = 0.0;
  double dist2 = 0.0;
  double cross = 0.0;
  Vector gphi;
  Vector gx;
  for (Index i = 0; i < problem.n(); ++i) {
    const Vector phi = phi_table.row(i).transpose();
    problem.component_gradient(i, phi, gphi);
    problem.component_gradient(i, x, gx);
    values += problem.component_value(i, phi);
    linear += gphi.dot(x - phi);
    gap2 += (gx - gphi).squaredNorm();
    dist2 += (x - phi).squaredNorm();
    cross += (gx - gphi).dot(phi - x);
  }
  const double n2 = n * n;
  const double lower = values / n + linear / n + beta / (2.0 * s * n2) * gap2 +
                       beta * lip / (2.0 * n2) * dist2 + beta / n2 * cross;
  const double fx = problem.smooth_objective(x);
  return inequality_report("big-data-lower-bound", lower, fx, scaled(tol, lower, fx));
}

double rate_bound(const FiniteSumProblem& problem, double alpha,
                  const Vector& phi0, double k) {
  if (!(problem.s() > 0.0)) throw StrongConvexityRequired();
  const double c = 1.0 - 1.0 / (2.0 * alpha);
  const double factor =
      std::pow(1.0 - 1.0 / (alpha * static_cast<double>(problem.n())), k);
  return c / problem.s() * factor * problem.full_gradient(phi0).squaredNorm();
}

std::vector<CheckReport> rate_curve(std::span<const std::vector<TraceRecord>> traces,
                                    const FiniteSumProblem& problem, double alpha,
                                    const Vector& phi0, double tol) {
  if (traces.empty()) throw InvalidArgument("rate check needs at least one trace");
  const std::size_t rows = traces.front().size();
  for (const auto& trace : traces)
    if (trace.size() != rows)
      throw InvalidArgument("traces must have the same number of records");

  std::vector<CheckReport> reports;
  for (std::size_t r = 0; r < rows; ++r) {
    const double epoch = traces.front()[r].epoch;
    double mean = 0.0;
    for (const auto& trace : traces) {
      if (trace[r].epoch != epoch)
        throw InvalidArgument("traces must share record epochs");
      mean += trace[r].suboptimality;
    }
    mean /= static_cast<double>(traces.size());
    const double k = std::round(epoch * static_cast<double>(problem.n()));
    const double bound = rate_bound(problem, alpha, phi0, k);
    reports.push_back(inequality_report("rate", mean, bound, tol,
                                        "k=" + std::to_string(static_cast<long long>(k))));
  }
  return reports;
}

CheckReport rate_certificate(std::span<const std::vector<TraceRecord>> traces,
                             const FiniteSumProblem& problem, double alpha,
                             const Vector& phi0, double tol) {
  const auto curve = rate_curve(traces, problem, alpha, phi0, tol);
  auto worst = std::min_element(curve.begin(), curve.end(),
                                [](const CheckReport& a, const CheckReport& b) {
                                  return a.slack < b.slack;
                                });
  CheckReport out = *worst;
  out.name = "rate-certificate";
  out.satisfied = std::all_of(curve.begin(), curve.end(),
                              [](const CheckReport& r) { return r.satisfied; });
  return out;
}

std::vector<FinitoState> trajectory_states(const FiniteSumProblem& problem,
                                           double alpha, const Vector& w0,
                                           long count, std::uint64_t seed) {
  std::vector<FinitoState> states;
  if (count <= 0) return states;
  states.reserve(static_cast<std::size_t>(count));
  FinitoState state = finito_init(problem, alpha, w0, true);
  Sampler sampler(SamplingScheme{SamplingKind::UniformWithReplacement, seed}, problem.n());
  states.push_back(state);
  while (static_cast<long>(states.size()) < count) {
    finito_step(state, problem, sampler.next());
    states.push_back(state);
  }
  return states;
}

}  // namespace finito::theory
