#pragma once

#include "jmls/mixture.hpp"

#include "oracles.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace checks {

/// Largest weight and moment discrepancy after pairing every oracle component
/// with the closest unused filter component of the same mode.
struct MixtureGap {
  double weight = 0.0;
  double moment = 0.0;
  bool paired = true;
};

inline MixtureGap compare_mixture(const jmls::HybridMixture& filter,
                                  const std::vector<oracle::EnumeratedComponent>& exact) {
  MixtureGap gap;
  if (filter.size() != exact.size()) {
    gap.paired = false;
    return gap;
  }
  std::vector<bool> used(filter.size(), false);
  for (const auto& e : exact) {
    std::size_t best = filter.size();
    double best_d = 0.0;
    for (std::size_t i = 0; i < filter.size(); ++i) {
      const auto& c = filter.components[i];
      if (used[i] || c.model != e.model) continue;
      const double d = std::abs(std::exp(c.log_weight) - e.weight) + (c.mean - e.mean).norm() +
                       (c.cov - e.cov).norm();
      if (best == filter.size() || d < best_d) {
        best = i;
        best_d = d;
      }
    }
    if (best == filter.size()) {
      gap.paired = false;
      return gap;
    }
    used[best] = true;
    const auto& c = filter.components[best];
    gap.weight = std::max(gap.weight, std::abs(std::exp(c.log_weight) - e.weight));
    gap.moment = std::max({gap.moment, (c.mean - e.mean).cwiseAbs().maxCoeff(),
                           (c.cov - e.cov).cwiseAbs().maxCoeff()});
  }
  return gap;
}

}  // namespace checks
