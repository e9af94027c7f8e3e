#include <charconv>
#include <cmath>
#include <string>

#include "finito/io.hpp"
#include "finito/rng.hpp"

namespace finito::io {
namespace {

double number_value(std::string_view key, std::string_view text) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw InvalidArgument("synth key '" + std::string(key) + "' has non-numeric value '" +
                          std::string(text) + "'");
  return v;
}

long long integer_value(std::string_view key, std::string_view text) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw InvalidArgument("synth key '" + std::string(key) + "' needs an integer, got '" +
                          std::string(text) + "'");
  return v;
}

}  // namespace

SynthSpec parse_synth_spec(std::string_view text) {
  SynthSpec spec;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const std::string_view item = text.substr(0, comma);
    text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string_view::npos)
      throw InvalidArgument("synth spec item '" + std::string(item) + "' is not key=value");
    const std::string_view key = item.substr(0, eq);
    const std::string_view value = item.substr(eq + 1);
    if (key == "n") {
      spec.n = static_cast<Index>(integer_value(key, value));
    } else if (key == "d") {
      spec.d = static_cast<Index>(integer_value(key, value));
    } else if (key == "beta") {
      spec.target_beta = number_value(key, value);
    } else if (key == "s") {
      spec.s = number_value(key, value);
    } else if (key == "noise") {
      spec.noise = number_value(key, value);
    } else if (key == "seed") {
      spec.seed = static_cast<std::uint64_t>(integer_value(key, value));
    } else if (key == "loss") {
      spec.loss = parse_loss(value);
    } else if (key == "l1" || key == "lambda") {
      spec.l1_weight = number_value(key, value);
    } else {
      throw InvalidArgument("unknown synth key '" + std::string(key) + "'");
    }
  }
  return spec;
}

FiniteSumProblem synth_problem(const SynthSpec& spec) {
  if (spec.n < 1 || spec.d < 1) throw InvalidArgument("synth needs n >= 1 and d >= 1");
  if (!(spec.s > 0.0)) throw StrongConvexityRequired();
  if (!(spec.target_beta > 0.0)) throw InvalidArgument("target beta must be positive");
  const double headroom = static_cast<double>(spec.n) / spec.target_beta - 1.0;
  if (!(headroom > 0.0))
    throw InvalidArgument("big data condition unreachable: need n > beta (n=" +
                          std::to_string(spec.n) + ", beta=" +
                          std::to_string(spec.target_beta) + ")");

  rng::Stream gen(rng::derive(spec.seed, 0x5e7));
  Matrix features(spec.n, spec.d);
  for (Index i = 0; i < spec.n; ++i)
    for (Index j = 0; j < spec.d; ++j) features(i, j) = rng::normal(gen);
  Vector planted(spec.d);
  for (Index j = 0; j < spec.d; ++j) planted[j] = rng::normal(gen);

  const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(spec.d));
  Vector targets(spec.n);
  for (Index i = 0; i < spec.n; ++i) {
    const double signal = features.row(i).dot(planted) * inv_sqrt_d;
    const double noisy = signal + spec.noise * rng::normal(gen);
    targets[i] = spec.loss == LossKind::Logistic ? (noisy >= 0.0 ? 1.0 : -1.0) : noisy;
  }

  // L = c * scale^2 * max ||x_i||^2 + s must not exceed n s / beta.
  const double curvature = spec.loss == LossKind::Logistic ? 0.25 : 1.0;
  const double max_row = features.rowwise().squaredNorm().maxCoeff();
  double scale = std::sqrt(spec.s * headroom / (curvature * max_row));
  FiniteSumProblem::Options options{.ridge = spec.s, .l1_weight = spec.l1_weight};
  for (;;) {
    FiniteSumProblem problem(features * scale, targets, spec.loss, options);
    if (big_data_check(problem, spec.target_beta).verdict) return problem;
    scale *= 1.0 - 1e-12;
  }
}

SynthResult synth_problem_with_reference(const SynthSpec& spec) {
  FiniteSumProblem problem = synth_problem(spec);
  ReferenceSolution reference = solve_reference(problem);
  return SynthResult{std::move(problem), std::move(reference)};
}

}  // namespace finito::io
