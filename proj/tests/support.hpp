#pragma once

#include <algorithm>
#include <cmath>

#include "finito/problem.hpp"
#include "finito/rng.hpp"

namespace testing {

using finito::FiniteSumProblem;
using finito::LossKind;
using finito::Matrix;
using finito::Vector;

// f_1 = (w-1)^2/2, f_2 = (w+1)^2/2. Both are 1-strongly convex without a
// ridge term, so s is declared rather than folded in.
inline FiniteSumProblem two_quadratics() {
  Matrix x(2, 1);
  x << 1.0, 1.0;
  Vector y(2);
  y << 1.0, -1.0;
  return FiniteSumProblem(x, y, LossKind::Squared,
                          FiniteSumProblem::Options{.ridge = 0.0, .strong_convexity = 1.0});
}

inline Vector scalar(double v) { return Vector::Constant(1, v); }

// Dense random problem with standard normal rows.
inline FiniteSumProblem random_problem(LossKind loss, finito::Index n, finito::Index d,
                                       double s, std::uint64_t seed) {
  finito::rng::Stream gen(finito::rng::derive(seed, 77));
  Matrix x(n, d);
  Vector y(n);
  for (finito::Index i = 0; i < n; ++i) {
    for (finito::Index j = 0; j < d; ++j) x(i, j) = finito::rng::normal(gen);
    const double r = finito::rng::normal(gen);
    y[i] = loss == LossKind::Logistic ? (r >= 0 ? 1.0 : -1.0) : r;
  }
  return FiniteSumProblem(x, y, loss, s);
}

inline Vector random_vector(finito::rng::Stream& gen, finito::Index d, double scale = 1.0) {
  Vector v(d);
  for (finito::Index j = 0; j < d; ++j) v[j] = scale * finito::rng::normal(gen);
  return v;
}

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace testing
