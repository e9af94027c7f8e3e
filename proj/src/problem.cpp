#include "finito/problem.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace finito {

std::string_view to_string(LossKind kind) {
  switch (kind) {
    case LossKind::Logistic:
      return "logistic";
    case LossKind::Squared:
      return "squared";
  }
  return "unknown";
}

LossKind parse_loss(std::string_view name) {
  if (name == "logistic" || name == "log") return LossKind::Logistic;
  if (name == "squared" || name == "quadratic") return LossKind::Squared;
  throw InvalidArgument("unknown loss '" + std::string(name) + "'");
}

FiniteSumProblem::FiniteSumProblem(Matrix features, Vector targets,
                                   LossKind loss, Options options)
    : features_(std::move(features)),
      targets_(std::move(targets)),
      loss_(loss),
      ridge_(options.ridge),
      strong_convexity_(options.strong_convexity.value_or(options.ridge)),
      l1_weight_(options.l1_weight) {
  if (features_.rows() < 1 || features_.cols() < 1)
    throw InvalidArgument("problem needs n >= 1 and d >= 1");
  if (targets_.size() != features_.rows())
    throw InvalidArgument("targets length " + std::to_string(targets_.size()) +
                          " does not match n = " +
                          std::to_string(features_.rows()));
  if (!(ridge_ >= 0.0) || !(strong_convexity_ >= 0.0) || !(l1_weight_ >= 0.0))
    throw InvalidArgument("ridge, s and l1_weight must be non-negative");
  if (!features_.allFinite() || !targets_.allFinite())
    throw InvalidArgument("features and targets must be finite");
  if (loss_ == LossKind::Logistic) {
    for (Index i = 0; i < targets_.size(); ++i)
      if (targets_[i] != 1.0 && targets_[i] != -1.0)
        throw InvalidArgument("logistic targets must be -1 or +1 (row " +
                              std::to_string(i) + ")");
  }
  const double curvature = loss_ == LossKind::Logistic ? 0.25 : 1.0;
  lipschitz_ = curvature * features_.rowwise().squaredNorm().maxCoeff() + ridge_;
}

FiniteSumProblem FiniteSumProblem::with_l1(double l1_weight) const {
  FiniteSumProblem copy = *this;
  if (!(l1_weight >= 0.0)) throw InvalidArgument("l1_weight must be >= 0");
  copy.l1_weight_ = l1_weight;
  return copy;
}

void FiniteSumProblem::check_index(Index i) const {
  if (i < 0 || i >= n())
    throw InvalidArgument("component index " + std::to_string(i) +
                          " out of range [0, " + std::to_string(n()) + ")");
}

void FiniteSumProblem::check_point(const Vector& w) const {
  if (w.size() != d())
    throw InvalidArgument("point has dimension " + std::to_string(w.size()) +
                          ", expected " + std::to_string(d()));
  if (!w.allFinite()) throw InvalidArgument("point has non-finite entries");
}

// log(1 + exp(-y m)) and its derivative in m. For |z| > 30 the direct forms
// lose everything to overflow or cancellation.
double FiniteSumProblem::loss_value(double margin, double y) const {
  if (loss_ == LossKind::Squared) {
    const double r = margin - y;
    return 0.5 * r * r;
  }
  const double z = -y * margin;
  if (z > 30.0) return z + std::log1p(std::exp(-z));
  return std::log1p(std::exp(z));
}

double FiniteSumProblem::loss_derivative(double margin, double y) const {
  if (loss_ == LossKind::Squared) return margin - y;
  const double z = -y * margin;
  // sigma(z) = 1 / (1 + exp(-z))
  const double sigma =
      z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
  return -y * sigma;
}

double FiniteSumProblem::component_value(Index i, const Vector& w) const {
  check_index(i);
  check_point(w);
  const double margin = features_.row(i).dot(w);
  return loss_value(margin, targets_[i]) + 0.5 * ridge_ * w.squaredNorm();
}

Vector FiniteSumProblem::component_gradient(Index i, const Vector& w) const {
  Vector out;
  component_gradient(i, w, out);
  return out;
}

void FiniteSumProblem::component_gradient(Index i, const Vector& w,
                                          Vector& out) const {
  check_index(i);
  if (w.size() != d())
    throw InvalidArgument("point has dimension " + std::to_string(w.size()) +
                          ", expected " + std::to_string(d()));
  const double margin = features_.row(i).dot(w);
  const double slope = loss_derivative(margin, targets_[i]);
  out.resize(d());
  out.noalias() = slope * features_.row(i).transpose() + ridge_ * w;
}

Vector FiniteSumProblem::full_gradient(const Vector& w) const {
  check_point(w);
  const Vector margins = features_ * w;
  Vector slopes(n());
  for (Index i = 0; i < n(); ++i)
    slopes[i] = loss_derivative(margins[i], targets_[i]);
  Vector g = features_.transpose() * slopes;
  g /= static_cast<double>(n());
  g += ridge_ * w;
  return g;
}

double FiniteSumProblem::smooth_objective(const Vector& w) const {
  check_point(w);
  const Vector margins = features_ * w;
  double total = 0.0;
  for (Index i = 0; i < n(); ++i) total += loss_value(margins[i], targets_[i]);
  return total / static_cast<double>(n()) + 0.5 * ridge_ * w.squaredNorm();
}

double FiniteSumProblem::full_objective(const Vector& w) const {
  double value = smooth_objective(w);
  if (l1_weight_ > 0.0) value += l1_weight_ * w.lpNorm<1>();
  return value;
}

BigDataReport big_data_check(const FiniteSumProblem& problem, double beta) {
  if (!(problem.s() > 0.0)) throw StrongConvexityRequired();
  if (!(beta > 0.0)) throw InvalidArgument("beta must be positive");
  const double lipschitz = problem.lipschitz_constant();
  const auto n = static_cast<double>(problem.n());
  return BigDataReport{
      .lipschitz = lipschitz,
      .s = problem.s(),
      .n = problem.n(),
      .beta_achieved = n * problem.s() / lipschitz,
      .beta_queried = beta,
      .verdict = n >= beta * lipschitz / problem.s(),
  };
}

Vector prox_operator(double l1_weight, const Vector& z, double step) {
  if (!(l1_weight >= 0.0)) throw InvalidArgument("l1_weight must be >= 0");
  if (!(step > 0.0)) throw InvalidArgument("prox step must be positive");
  if (l1_weight == 0.0) return z;
  const double t = l1_weight * step;
  Vector out(z.size());
  for (Index j = 0; j < z.size(); ++j) {
    const double shrunk = std::max(std::abs(z[j]) - t, 0.0);
    out[j] = std::copysign(shrunk, z[j]);
    if (shrunk == 0.0) out[j] = 0.0;
  }
  return out;
}

double stationarity(const FiniteSumProblem& problem, const Vector& w) {
  const Vector g = problem.full_gradient(w);
  if (problem.l1_weight() == 0.0) return g.norm();
  const double t = 1.0 / problem.lipschitz_constant();
  const Vector next = prox_operator(problem.l1_weight(), w - t * g, t);
  return (w - next).norm() / t;
}

ReferenceSolution solve_reference(const FiniteSumProblem& problem,
                                  ReferenceOptions options) {
  const double lambda = problem.l1_weight();
  const double lipschitz = problem.lipschitz_constant();
  const bool proximal = lambda > 0.0;

  Vector w = Vector::Zero(problem.d());
  double smooth = problem.smooth_objective(w);
  Vector g = problem.full_gradient(w);
  double step = 1.0 / lipschitz;
  long iter = 0;
  int stalled = 0;

  // Backtracking on the standard sufficient-decrease test
  //   F(w+) <= F(w) + <g, w+ - w> + ||w+ - w||^2 / (2 t),
  // with the trial step doubled after each accepted iteration. The step never
  // drops below 1/L, which needs no test, so rounding in the objective near
  // the optimum cannot stall the solve.
  const double min_step = 1.0 / lipschitz;
  for (; iter < options.max_iterations; ++iter) {
    const double residual =
        proximal ? (w - prox_operator(lambda, w - min_step * g, min_step))
                           .norm() /
                       min_step
                 : g.norm();
    if (residual <= options.tolerance) break;
    step *= 2.0;
    Vector next;
    double next_smooth = 0.0;
    for (;;) {
      next = proximal ? prox_operator(lambda, w - step * g, step)
                      : Vector(w - step * g);
      next_smooth = problem.smooth_objective(next);
      if (step <= min_step) break;
      const Vector delta = next - w;
      if (next_smooth <=
          smooth + g.dot(delta) + delta.squaredNorm() / (2.0 * step))
        break;
      step = std::max(0.5 * step, min_step);
    }
    if (next == w) {
      if (++stalled > 3) break;
    } else {
      stalled = 0;
    }
    w = std::move(next);
    smooth = next_smooth;
    g = problem.full_gradient(w);
  }

  ReferenceSolution ref;
  ref.w_star = w;
  ref.f_star = problem.full_objective(w);
  ref.grad_norm_at_solution = stationarity(problem, w);
  ref.method_tag = proximal ? "proximal-gradient" : "gradient-descent";
  ref.iterations = iter;
  return ref;
}

}  // namespace finito
