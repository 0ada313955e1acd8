#pragma once

#include "jmls/types.hpp"

#include <optional>
#include <vector>

namespace jmls {

struct GaussianComponent {
  double log_weight = 0.0;
  Vector mean;
  Matrix cov;
  int model = 0;   // zero-based mode index z
  int parent = -1; // index of the component this one was propagated from
};

/// Hybrid Gaussian mixture over (x_k, z_k). Components are stored flattened
/// and grouped by mode in ascending order, which is the order of the weight
/// array the reduction step operates on.
struct HybridMixture {
  std::vector<GaussianComponent> components;
  std::optional<std::size_t> ancestor;

  std::size_t size() const { return components.size(); }
  std::size_t count(int model) const;

  /// Subtracts log-sum-exp of the weights and returns it. Components with
  /// log_weight = -inf are left in place.
  double normalize();

  double log_total_weight() const;

  /// exp(log_weight) in storage order.
  std::vector<double> weights() const;

  /// Sum of exp(log_weight) per mode.
  std::vector<double> model_masses(int num_models) const;
};

}  // namespace jmls
