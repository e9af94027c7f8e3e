#include <doctest.h>

#include <cmath>

#include "finito/lower_bounds.hpp"
#include "support.hpp"

using namespace finito;
using namespace finito::lower_bounds;

TEST_CASE("worst case construction") {
  const auto p = make_worst_case(4);
  CHECK(p.full_objective(Vector::Zero(4)) == 2.0);
  CHECK(p.full_objective(Vector::Constant(4, 0.5)) == 1.0);
  CHECK(p.s() == 1.0);
  CHECK(p.lipschitz_constant() == 5.0);
  CHECK(p.full_gradient(Vector::Constant(4, 0.5)).norm() == 0.0);

  const auto one = make_worst_case(1);
  CHECK(one.full_objective(testing::scalar(0.5)) == 0.25);
  CHECK(one.full_gradient(testing::scalar(0.5))[0] == 0.0);

  const auto g = p.component_gradient(2, Vector::Zero(4));
  Vector expect = Vector::Zero(4);
  expect[2] = -4.0;
  CHECK(g == expect);
}

TEST_CASE("expected unseen count") {
  CHECK(expected_unseen(2, 1) == 1.0);
  CHECK(expected_unseen(7, 0) == 7.0);
  CHECK(expected_unseen(10, 10) == doctest::Approx(3.486784401).epsilon(1e-12));
}

TEST_CASE("simulation summaries") {
  const auto zero = simulate_unseen(10, 0, 1000, 1);
  CHECK(zero.mean == 10.0);
  CHECK(zero.stderr_mean == 0.0);
  CHECK(zero.martingale_mean == 10.0);

  const std::uint64_t ks[] = {1, 5, 20};
  const auto curve = simulate_unseen_curve(10, ks, 200000, 3);
  for (const auto& row : curve) {
    CHECK(std::abs(row.mean - expected_unseen(10, row.k)) <= 4 * row.stderr_mean);
    CHECK(std::abs(row.martingale_mean - 10.0) <= 4 * row.martingale_stderr);
  }
  // One sweep agrees with separate single-k runs.
  CHECK(simulate_unseen(10, 5, 2000, 3).mean == simulate_unseen_curve(10, ks, 2000, 3)[1].mean);

  const std::uint64_t unsorted[] = {5, 1};
  CHECK_THROWS_AS(simulate_unseen_curve(10, unsorted, 10, 1), InvalidArgument);
}

TEST_CASE("oracle limited suboptimality") {
  const std::vector<std::uint8_t> all(4, 1), none(4, 0), half = {1, 0, 1, 0};
  CHECK(oracle_limited_suboptimality(4, all) == 0.0);
  CHECK(oracle_limited_suboptimality(4, none) == 1.0);
  CHECK(oracle_limited_suboptimality(4, half) == 0.5);

  // Agrees with the objective at the best point over the seen coordinates.
  const auto p = make_worst_case(4);
  Vector w = Vector::Zero(4);
  w[0] = w[2] = 0.5;
  CHECK(p.full_objective(w) - 1.0 == 0.5);
}

TEST_CASE("floor averaged over simulated seen sets") {
  const Index n = 10;
  const std::uint64_t ks[] = {0, 5, 10, 20};
  const auto curve = simulate_unseen_curve(n, ks, 200000, 17);
  for (const auto& row : curve) {
    const double floor = row.mean / 4.0;
    const double expect = std::pow(0.9, static_cast<double>(row.k)) * n / 4.0;
    CHECK(std::abs(floor - expect) <= 4 * row.stderr_mean / 4.0);
  }
}

TEST_CASE("solvers do not beat the floor") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    CHECK(floor_margin(10, SolverKind::Finito, 300, seed).min_slack >= -1e-9);
    CHECK(floor_margin(10, SolverKind::Sag, 300, seed).min_slack >= -1e-9);
  }
  CHECK_THROWS_AS(floor_margin(10, SolverKind::Miso, 10, 0), InvalidArgument);
}
