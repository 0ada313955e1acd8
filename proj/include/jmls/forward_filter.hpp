#pragma once

#include "jmls/kalman.hpp"
#include "jmls/mixture.hpp"
#include "jmls/model.hpp"
#include "jmls/rng.hpp"

#include <optional>
#include <span>
#include <vector>

namespace jmls {

/// An ancestor whose normalized log weight drops below this is no longer tracked.
double dead_ancestor_log_weight();

/// Everything the backward pass needs from one forward sweep.
struct FilterHistory {
  /// Normalized filtered mixtures p(x_k, z_k | y_{1:k}) before reduction, k = 1..N.
  std::vector<HybridMixture> filtered;
  /// Predicted mixture p(x_{N+1}, z_{N+1} | y_{1:N}).
  HybridMixture predicted_final;
  /// Index a_k of the conditioned component in `filtered[k]`, when tracked.
  std::vector<std::optional<std::size_t>> ancestor;
  /// Index of a component flagged dead at step k (excluded from backward sampling).
  std::vector<std::optional<std::size_t>> dead;
  /// log sum of corrected weights at each step; sums to log p(y_{1:N}).
  std::vector<double> log_normalizers;
  double log_likelihood = 0.0;
  std::size_t reductions = 0;
  std::size_t degenerate_reductions = 0;

  std::vector<DecorrelatedModel> models;
  std::vector<Vector> augmented_inputs;
  Matrix T;

  std::size_t steps() const { return filtered.size(); }
};

/// Conditional forward filter. `conditioned_z` (zero-based, length N + 1) is
/// the previous sweep's mode sequence; its component is never removed by the
/// reduction. Pass an empty span for an unconditioned pass.
FilterHistory forward_filter(const JmlsParams& params, const Dataset& data,
                             const HybridPrior& prior, std::size_t max_components,
                             std::span<const int> conditioned_z, Rng& rng);

}  // namespace jmls
