#include "finito/lower_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "finito/rng.hpp"

namespace finito::lower_bounds {

FiniteSumProblem make_worst_case(Index n) {
  if (n < 1) throw InvalidArgument("worst case needs n >= 1");
  const double root = std::sqrt(static_cast<double>(n));
  Matrix features = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) features(i, i) = root;
  Vector targets = Vector::Constant(n, root);
  return FiniteSumProblem(std::move(features), std::move(targets), LossKind::Squared,
                          FiniteSumProblem::Options{.ridge = 1.0});
}

double expected_unseen(Index n, std::uint64_t k) {
  if (n < 1) throw InvalidArgument("n must be >= 1");
  const auto nd = static_cast<double>(n);
  return nd * std::pow(1.0 - 1.0 / nd, static_cast<double>(k));
}

std::vector<UnseenSummary> simulate_unseen_curve(Index n,
                                                 std::span<const std::uint64_t> ks,
                                                 std::uint64_t trials,
                                                 std::uint64_t seed) {
  if (n < 1) throw InvalidArgument("n must be >= 1");
  if (trials < 1) throw InvalidArgument("trials must be >= 1");
  if (!std::is_sorted(ks.begin(), ks.end()))
    throw InvalidArgument("k list must be ascending");

  const auto nd = static_cast<double>(n);
  const std::size_t m = ks.size();
  std::vector<double> sum(m, 0.0), sum_sq(m, 0.0);
  std::vector<double> weight(m);
  for (std::size_t c = 0; c < m; ++c)
    weight[c] = std::pow(1.0 - 1.0 / nd, -static_cast<double>(ks[c]));

  std::vector<std::uint8_t> seen(static_cast<std::size_t>(n));
  for (std::uint64_t t = 0; t < trials; ++t) {
    std::fill(seen.begin(), seen.end(), std::uint8_t{0});
    auto unseen = static_cast<std::uint64_t>(n);
    rng::Stream gen(rng::derive(seed, t));
    std::uint64_t drawn = 0;
    for (std::size_t c = 0; c < m; ++c) {
      for (; drawn < ks[c]; ++drawn) {
        const auto j = rng::bounded(gen, static_cast<std::uint64_t>(n));
        if (!seen[j]) {
          seen[j] = 1;
          --unseen;
        }
      }
      const auto v = static_cast<double>(unseen);
      sum[c] += v;
      sum_sq[c] += v * v;
    }
  }

  const auto tr = static_cast<double>(trials);
  std::vector<UnseenSummary> out(m);
  for (std::size_t c = 0; c < m; ++c) {
    const double mean = sum[c] / tr;
    const double var =
        trials > 1 ? std::max(0.0, (sum_sq[c] - tr * mean * mean) / (tr - 1.0)) : 0.0;
    const double se = std::sqrt(var / tr);
    out[c] = UnseenSummary{.k = ks[c],
                           .mean = mean,
                           .stderr_mean = se,
                           .martingale_mean = weight[c] * mean,
                           .martingale_stderr = weight[c] * se};
  }
  return out;
}

UnseenSummary simulate_unseen(Index n, std::uint64_t k, std::uint64_t trials,
                              std::uint64_t seed) {
  const std::uint64_t ks[] = {k};
  return simulate_unseen_curve(n, ks, trials, seed).front();
}

double oracle_limited_suboptimality(Index n, std::span<const std::uint8_t> seen_mask) {
  if (static_cast<Index>(seen_mask.size()) != n)
    throw InvalidArgument("seen mask must have n entries");
  const auto unseen = std::count(seen_mask.begin(), seen_mask.end(), std::uint8_t{0});
  return static_cast<double>(unseen) / 4.0;
}

FloorMargin floor_margin(Index n, SolverKind solver, std::uint64_t steps,
                         std::uint64_t seed, double alpha) {
  if (solver != SolverKind::Finito && solver != SolverKind::Sag)
    throw InvalidArgument("floor check supports finito and sag");
  const FiniteSumProblem problem = make_worst_case(n);
  const double f_star = static_cast<double>(n) / 4.0;
  const Vector w0 = Vector::Zero(n);
  Sampler sampler(SamplingScheme{SamplingKind::UniformWithReplacement, seed}, n);

  SolverState state;
  if (solver == SolverKind::Finito)
    state = finito_init_lazy(problem, alpha, w0);
  else
    state = sag_init_lazy(problem, sag_default_step(problem, true), w0);

  FloorMargin out;
  out.min_slack = std::numeric_limits<double>::infinity();
  for (std::uint64_t t = 0;; ++t) {
    const auto* finito = std::get_if<FinitoState>(&state);
    const auto* sag = std::get_if<SagState>(&state);
    const Vector& w = finito ? finito->w : sag->w;
    const auto& seen = finito ? finito->seen : sag->seen;
    const double floor = oracle_limited_suboptimality(n, seen);
    const double gap = problem.full_objective(w) - f_star;
    if (gap - floor < out.min_slack) {
      out = FloorMargin{gap - floor, t, floor, gap};
    }
    if (t == steps) break;
    const Index j = sampler.next();
    if (auto* f = std::get_if<FinitoState>(&state))
      finito_step(*f, problem, j);
    else
      sag_step(std::get<SagState>(state), problem, j);
  }
  return out;
}

}  // namespace finito::lower_bounds
