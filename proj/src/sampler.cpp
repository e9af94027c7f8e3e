#include "finito/sampler.hpp"

#include <numeric>
#include <string>
#include <utility>

#include "finito/rng.hpp"

namespace finito {

std::string_view to_string(const SamplingScheme& scheme) {
  switch (scheme.kind) {
    case SamplingKind::UniformWithReplacement:
      return "uniform";
    case SamplingKind::PermutedPerPass:
      return scheme.refresh_permutation ? "permuted" : "permuted-frozen";
    case SamplingKind::Cyclic:
      return "cyclic";
  }
  return "unknown";
}

SamplingScheme parse_sampling(std::string_view name, std::uint64_t seed) {
  SamplingScheme scheme{.seed = seed};
  if (name == "uniform") {
    scheme.kind = SamplingKind::UniformWithReplacement;
  } else if (name == "permuted") {
    scheme.kind = SamplingKind::PermutedPerPass;
  } else if (name == "permuted-frozen") {
    scheme.kind = SamplingKind::PermutedPerPass;
    scheme.refresh_permutation = false;
  } else if (name == "cyclic") {
    scheme.kind = SamplingKind::Cyclic;
  } else {
    throw InvalidArgument("unknown sampling scheme '" + std::string(name) + "'");
  }
  return scheme;
}

std::vector<Index> pass_permutation(std::uint64_t seed, std::uint64_t pass, Index n) {
  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  rng::Stream gen(rng::derive(seed, pass));
  // Fisher-Yates with unbiased bounded draws.
  for (auto i = static_cast<std::uint64_t>(n) - 1; i > 0; --i) {
    const auto j = rng::bounded(gen, i + 1);
    std::swap(perm[i], perm[j]);
  }
  return perm;
}

Sampler::Sampler(SamplingScheme scheme, Index n, std::uint64_t draws)
    : scheme_(scheme), n_(n), draws_(draws) {
  if (n < 1) throw InvalidArgument("sampler needs n >= 1 (empty problem)");
}

void Sampler::load_pass(std::uint64_t pass) {
  const std::uint64_t key = scheme_.refresh_permutation ? pass : 0;
  if (loaded_pass_ == key) return;
  permutation_ = pass_permutation(scheme_.seed, key, n_);
  loaded_pass_ = key;
}

Index Sampler::next() {
  const auto n = static_cast<std::uint64_t>(n_);
  const std::uint64_t draw = draws_++;
  switch (scheme_.kind) {
    case SamplingKind::Cyclic:
      return static_cast<Index>(draw % n);
    case SamplingKind::PermutedPerPass:
      load_pass(draw / n);
      return permutation_[draw % n];
    case SamplingKind::UniformWithReplacement: {
      rng::Stream gen(rng::derive(scheme_.seed ^ 0x5bd1e9955bd1e995ULL, draw));
      return static_cast<Index>(rng::bounded(gen, n));
    }
  }
  throw InvalidArgument("unknown sampling kind");
}

}  // namespace finito
