#pragma once

#include "jmls/forward_filter.hpp"

namespace jmls {

struct Trajectory {
  std::vector<Vector> x;       // N + 1
  std::vector<int> z;          // N + 1, zero based
  std::vector<std::size_t> b;  // sampled component (flat index), diagnostic only

  std::size_t size() const { return z.size(); }
};

/// Conditions the filtered mixture at k on (x_{k+1}, z_{k+1}) and normalizes.
/// The returned mixture has one component per filtered component, in the same order.
HybridMixture backward_smooth_step(const HybridMixture& filtered, const Vector& x_next, int z_next,
                                   std::span<const DecorrelatedModel> models, const Vector& ubar,
                                   const Matrix& T);

/// Draws xi_{1:N+1} from the stored forward pass.
Trajectory sample_trajectory(const FilterHistory& history, const JmlsParams& params, Rng& rng);

}  // namespace jmls
