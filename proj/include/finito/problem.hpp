#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "finito/types.hpp"

namespace finito {

enum class LossKind { Logistic, Squared };

std::string_view to_string(LossKind kind);
LossKind parse_loss(std::string_view name);

/// Finite sum f(w) = (1/n) sum_i f_i(w) + l1_weight * ||w||_1 with
///
///   f_i(w) = loss(<x_i, w>, y_i) + (ridge / 2) ||w||^2.
///
/// `strong_convexity` is the constant s handed to the solvers. It defaults to
/// the ridge weight; a caller may declare a larger value when the loss itself
/// is strongly convex (e.g. a squared loss on a full-rank one-dimensional
/// row). Immutable after construction.
class FiniteSumProblem {
 public:
  struct Options {
    double ridge = 0.0;
    std::optional<double> strong_convexity;  // defaults to ridge
    double l1_weight = 0.0;
  };

  FiniteSumProblem(Matrix features, Vector targets, LossKind loss,
                   Options options);
  FiniteSumProblem(Matrix features, Vector targets, LossKind loss, double s)
      : FiniteSumProblem(std::move(features), std::move(targets), loss,
                         Options{.ridge = s}) {}

  Index n() const { return features_.rows(); }
  Index d() const { return features_.cols(); }
  const Matrix& features() const { return features_; }
  const Vector& targets() const { return targets_; }
  LossKind loss() const { return loss_; }
  double s() const { return strong_convexity_; }
  double ridge() const { return ridge_; }
  double l1_weight() const { return l1_weight_; }

  /// Copy of this problem with a different L1 weight.
  FiniteSumProblem with_l1(double l1_weight) const;

  double component_value(Index i, const Vector& w) const;
  Vector component_gradient(Index i, const Vector& w) const;
  /// Writes f_i'(w) into `out` (resized as needed) without allocating.
  void component_gradient(Index i, const Vector& w, Vector& out) const;

  /// (1/n) sum_i f_i'(w); the smooth part only.
  Vector full_gradient(const Vector& w) const;
  /// (1/n) sum_i f_i(w), excluding the L1 term.
  double smooth_objective(const Vector& w) const;
  /// (1/n) sum_i f_i(w) + l1_weight * ||w||_1.
  double full_objective(const Vector& w) const;

  /// max_i L_i with L_i = c ||x_i||^2 + ridge, c = 1 (squared) or 1/4
  /// (logistic). Valid gradient-Lipschitz bound for every f_i and for f.
  double lipschitz_constant() const { return lipschitz_; }

 private:
  void check_index(Index i) const;
  void check_point(const Vector& w) const;
  double loss_value(double margin, double y) const;
  double loss_derivative(double margin, double y) const;

  Matrix features_;
  Vector targets_;
  LossKind loss_;
  double ridge_;
  double strong_convexity_;
  double l1_weight_;
  double lipschitz_;
};

struct BigDataReport {
  double lipschitz;
  double s;
  Index n;
  double beta_achieved;  // n s / L
  double beta_queried;
  bool verdict;          // n >= beta L / s
};

/// Checks the big data condition n >= beta * L / s.
BigDataReport big_data_check(const FiniteSumProblem& problem, double beta);

/// Coordinatewise soft threshold at l1_weight * step.
Vector prox_operator(double l1_weight, const Vector& z, double step);

/// Proximal-gradient residual ||w - prox(w - t f'(w))|| / t at t = 1/L; equals
/// the gradient norm when l1_weight = 0.
double stationarity(const FiniteSumProblem& problem, const Vector& w);

struct ReferenceSolution {
  Vector w_star;
  double f_star = 0.0;
  double grad_norm_at_solution = 0.0;  // stationarity() at w_star
  std::string method_tag;
  long iterations = 0;
};

struct ReferenceOptions {
  double tolerance = 1e-12;
  long max_iterations = 1'000'000;
};

/// Full-gradient descent with backtracking (proximal gradient when the
/// problem has an L1 term), run until stationarity() <= tolerance or no
/// further progress is representable.
ReferenceSolution solve_reference(const FiniteSumProblem& problem,
                                  ReferenceOptions options = {});

}  // namespace finito
