#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "finito/types.hpp"

namespace finito {

enum class SamplingKind { UniformWithReplacement, PermutedPerPass, Cyclic };

/// Index-selection policy. `refresh_permutation = false` keeps the first
/// pass's permutation for every later pass (pre-permute once, then in-order
/// passes); it only affects PermutedPerPass.
struct SamplingScheme {
  SamplingKind kind = SamplingKind::UniformWithReplacement;
  std::uint64_t seed = 0;
  bool refresh_permutation = true;
};

/// Names used on the command line: uniform, permuted, permuted-frozen, cyclic.
std::string_view to_string(const SamplingScheme& scheme);
SamplingScheme parse_sampling(std::string_view name, std::uint64_t seed);

/// Deterministic index stream. Every draw is a pure function of
/// (scheme, n, draw number): uniform draws are keyed by their counter and each
/// pass's permutation by (seed, pass), so a sampler is fully described by how
/// many indices it has handed out.
class Sampler {
 public:
  Sampler(SamplingScheme scheme, Index n, std::uint64_t draws = 0);

  Index next();

  Index n() const { return n_; }
  std::uint64_t draws() const { return draws_; }
  std::uint64_t passes_completed() const { return draws_ / static_cast<std::uint64_t>(n_); }
  const SamplingScheme& scheme() const { return scheme_; }

  /// Permutation used for the current pass (PermutedPerPass only).
  const std::vector<Index>& permutation() const { return permutation_; }

 private:
  void load_pass(std::uint64_t pass);

  SamplingScheme scheme_;
  Index n_;
  std::uint64_t draws_ = 0;
  std::uint64_t loaded_pass_ = ~std::uint64_t{0};
  std::vector<Index> permutation_;
};

/// Uniformly random permutation of 0..n-1 for the given (seed, pass).
std::vector<Index> pass_permutation(std::uint64_t seed, std::uint64_t pass, Index n);

}  // namespace finito
