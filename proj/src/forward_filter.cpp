#include "jmls/forward_filter.hpp"

#include "jmls/dpf.hpp"
#include "jmls/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace jmls {

double dead_ancestor_log_weight() {
  return std::log(std::numeric_limits<double>::min()) + 50.0;
}

namespace {

void check_inputs(const JmlsParams& params, const Dataset& data, const HybridPrior& prior,
                  std::size_t max_components, std::span<const int> conditioned_z) {
  require_valid(params);
  data.validate();
  const Dimensions d = params.dims();
  if (data.n_u() != d.n_u || data.n_y() != d.n_y) {
    throw std::invalid_argument("forward_filter: data dimensions do not match the parameters");
  }
  prior.validate(d.m, d.n_x);
  if (max_components < 2) throw std::invalid_argument("forward_filter: M must be at least 2");
  if (!conditioned_z.empty()) {
    if (conditioned_z.size() != data.size() + 1) {
      throw std::invalid_argument("forward_filter: conditioned sequence must have length N + 1");
    }
    for (int z : conditioned_z) {
      if (z < 0 || z >= d.m) {
        throw std::invalid_argument("forward_filter: conditioned sequence out of range");
      }
    }
  }
}

HybridMixture initial_mixture(const HybridPrior& prior, std::span<const int> conditioned_z) {
  auto entries = prior.entries;
  std::stable_sort(entries.begin(), entries.end(),
                   [](const auto& a, const auto& b) { return a.model < b.model; });
  HybridMixture mix;
  for (const auto& e : entries) {
    if (!(e.weight > 0.0)) continue;
    GaussianComponent c;
    c.log_weight = std::log(e.weight);
    c.mean = e.mean;
    c.cov = e.cov;
    c.model = e.model;
    if (!conditioned_z.empty() && !mix.ancestor && e.model == conditioned_z[0]) {
      mix.ancestor = mix.components.size();
    }
    mix.components.push_back(std::move(c));
  }
  return mix;
}

}  // namespace

FilterHistory forward_filter(const JmlsParams& params, const Dataset& data,
                             const HybridPrior& prior, std::size_t max_components,
                             std::span<const int> conditioned_z, Rng& rng) {
  check_inputs(params, data, prior, max_components, conditioned_z);
  const Dimensions d = params.dims();
  const std::size_t N = data.size();

  FilterHistory h;
  h.models = decorrelate(params);
  h.T = params.T;
  h.augmented_inputs.reserve(N);
  for (std::size_t k = 0; k < N; ++k) h.augmented_inputs.push_back(data.augmented_input(k));
  h.filtered.reserve(N);
  h.ancestor.reserve(N);
  h.dead.assign(N, std::nullopt);
  h.log_normalizers.reserve(N);

  const bool conditioned = !conditioned_z.empty();
  HybridMixture predicted = initial_mixture(prior, conditioned_z);
  const double dead_level = dead_ancestor_log_weight();

  for (std::size_t k = 0; k < N; ++k) {
    const Vector& ubar = h.augmented_inputs[k];
    try {
      kernels::correct_components(predicted.components, h.models, ubar, data.y[k]);
    } catch (const NumericalError& e) {
      throw NumericalError(std::string(e.what()) + " at step " + std::to_string(k + 1));
    }
    const double log_norm = predicted.normalize();
    if (!std::isfinite(log_norm)) {
      throw NumericalError("filter degeneracy at step " + std::to_string(k + 1));
    }
    h.log_normalizers.push_back(log_norm);
    h.log_likelihood += log_norm;

    if (predicted.ancestor && predicted.components[*predicted.ancestor].log_weight < dead_level) {
      h.dead[k] = predicted.ancestor;
      predicted.ancestor.reset();
    }
    h.filtered.push_back(predicted);
    h.ancestor.push_back(predicted.ancestor);

    HybridMixture reduced;
    if (predicted.size() > max_components) {
      auto r = dpf_resample(predicted, max_components, rng);
      ++h.reductions;
      if (r.residual_dropped) ++h.degenerate_reductions;
      reduced = std::move(r.mixture);
    } else {
      reduced = std::move(predicted);
    }

    const auto moved = kernels::propagate_moments(reduced.components, h.models, ubar);
    HybridMixture next;
    next.components.reserve(reduced.size() * static_cast<std::size_t>(d.m));
    for (int z_next = 0; z_next < d.m; ++z_next) {
      for (std::size_t j = 0; j < reduced.size(); ++j) {
        const double t = params.T(z_next, reduced.components[j].model);
        if (!(t > 0.0)) continue;
        if (conditioned && reduced.ancestor == j && conditioned_z[k + 1] == z_next) {
          next.ancestor = next.components.size();
        }
        GaussianComponent c = moved[j];
        c.log_weight = reduced.components[j].log_weight + std::log(t);
        c.model = z_next;
        c.parent = static_cast<int>(j);
        next.components.push_back(std::move(c));
      }
    }
    predicted = std::move(next);
  }
  predicted.normalize();
  h.predicted_final = std::move(predicted);
  return h;
}

}  // namespace jmls
