#pragma once

#include "jmls/mixture.hpp"
#include "jmls/rng.hpp"

#include <span>
#include <vector>

namespace jmls {

/// Number of components to keep deterministically when reducing to at most
/// `max_kept` survivors. `sorted_weights` must be normalized and sorted in
/// descending order; component j (1-based) is kept while
/// W_j (K - j) >= sum_{i > j} W_i holds for every j' <= j. Returns 0 when
/// every component should go through resampling.
std::size_t dpf_threshold(std::span<const double> sorted_weights, std::size_t max_kept);

/// Systematic resampling of `draws` indices from normalized weights with a
/// single offset u in (0, 1). Stratum j selects the first i with
/// Q(i) >= (j + u) / draws. Duplicates are allowed. Zero-based indices.
std::vector<std::size_t> systematic_sample(std::span<const double> weights, std::size_t draws,
                                           double u);

struct DpfReduction {
  HybridMixture mixture;
  std::size_t kept_deterministically = 0;  // L, excluding the ancestor
  std::size_t resampled = 0;               // number of systematic draws
  bool residual_dropped = false;           // no draws left for nonzero residual mass
};

/// Reduces a mixture of n > M components to exactly M entries. The ancestor
/// (when present) is kept with its original weight, the L largest remaining
/// weights are kept as they are, and the rest are resampled systematically,
/// each draw carrying weight v / R. Output preserves mode-major ordering.
DpfReduction dpf_resample(const HybridMixture& mixture, std::size_t max_components, Rng& rng);

}  // namespace jmls
