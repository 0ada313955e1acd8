#include "jmls/dpf.hpp"

#include "jmls/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace jmls {

std::size_t dpf_threshold(std::span<const double> sorted_weights, std::size_t max_kept) {
  const std::size_t n = sorted_weights.size();
  if (max_kept < 1 || max_kept > n) {
    throw std::invalid_argument("dpf_threshold: need 1 <= K <= n");
  }
  for (std::size_t i = 1; i < n; ++i) {
    if (sorted_weights[i] > sorted_weights[i - 1]) {
      throw std::invalid_argument("dpf_threshold: weights are not sorted in descending order");
    }
  }
  // tail[j] = sum_{i >= j} W_i (zero based), accumulated from the smallest weight.
  std::vector<double> tail(n + 1, 0.0);
  for (std::size_t i = n; i-- > 0;) tail[i] = tail[i + 1] + sorted_weights[i];
  if (std::abs(tail[0] - 1.0) > 1e-9) {
    throw std::invalid_argument("dpf_threshold: weights are not normalized");
  }

  std::size_t kept = 0;
  for (std::size_t j = 1; j <= max_kept; ++j) {
    const double slots = static_cast<double>(max_kept - j);
    if (sorted_weights[j - 1] * slots >= tail[j]) {
      kept = j;
    } else {
      break;
    }
  }
  return kept;
}

std::vector<std::size_t> systematic_sample(std::span<const double> weights, std::size_t draws,
                                           double u) {
  if (weights.empty()) throw std::invalid_argument("systematic_sample: no weights");
  std::vector<double> cumulative(weights.size());
  std::partial_sum(weights.begin(), weights.end(), cumulative.begin());

  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] > 0.0) last_positive = i;
  }

  std::vector<std::size_t> out;
  out.reserve(draws);
  std::size_t i = 0;
  const double r = static_cast<double>(draws);
  for (std::size_t j = 0; j < draws; ++j) {
    const double threshold = (static_cast<double>(j) + u) / r;
    while (i < cumulative.size() && cumulative[i] < threshold) ++i;
    // Rounding can leave Q(n) slightly below one.
    out.push_back(i < cumulative.size() ? i : last_positive);
  }
  return out;
}

DpfReduction dpf_resample(const HybridMixture& mixture, std::size_t max_components, Rng& rng) {
  const std::size_t n = mixture.size();
  if (max_components < 2 || n <= max_components) {
    throw std::invalid_argument("dpf_resample: need n > M >= 2");
  }
  if (mixture.ancestor && *mixture.ancestor >= n) {
    throw std::invalid_argument("dpf_resample: ancestor index out of range");
  }

  std::vector<std::size_t> others;
  others.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!mixture.ancestor || i != *mixture.ancestor) others.push_back(i);
  }
  std::vector<double> other_logs;
  other_logs.reserve(others.size());
  for (auto i : others) other_logs.push_back(mixture.components[i].log_weight);
  const double log_others = log_sum_exp(other_logs);

  // (original index, log weight) of every survivor.
  std::vector<std::pair<std::size_t, double>> selected;
  selected.reserve(max_components);
  if (mixture.ancestor) {
    selected.emplace_back(*mixture.ancestor, mixture.components[*mixture.ancestor].log_weight);
  }

  DpfReduction result;
  if (!std::isfinite(log_others)) {
    result.residual_dropped = true;
  } else {
    std::vector<std::size_t> order(others.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> W(others.size());
    for (std::size_t i = 0; i < others.size(); ++i) W[i] = std::exp(other_logs[i] - log_others);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return W[a] > W[b]; });

    std::vector<double> sorted(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) sorted[i] = W[order[i]];
    // Renormalize against rounding so the threshold sees an exact unit sum check.
    const double sorted_total = std::accumulate(sorted.begin(), sorted.end(), 0.0);
    for (auto& w : sorted) w /= sorted_total;

    const std::size_t max_kept = mixture.ancestor ? max_components - 1 : max_components;
    const std::size_t kept = dpf_threshold(sorted, max_kept);
    result.kept_deterministically = kept;
    for (std::size_t r = 0; r < kept; ++r) {
      const std::size_t idx = others[order[r]];
      selected.emplace_back(idx, mixture.components[idx].log_weight);
    }

    // Residual set in original order.
    std::vector<std::size_t> residual;
    for (std::size_t r = kept; r < order.size(); ++r) residual.push_back(order[r]);
    std::sort(residual.begin(), residual.end());
    std::vector<double> residual_logs;
    for (auto r : residual) residual_logs.push_back(other_logs[r]);
    const double log_v = log_sum_exp(residual_logs);

    const std::size_t draws = max_kept - kept;
    result.resampled = draws;
    if (draws == 0) {
      // Residual mass that underflows to zero relative to the rest is not a loss.
      result.residual_dropped =
          std::accumulate(sorted.begin() + static_cast<std::ptrdiff_t>(kept), sorted.end(), 0.0) > 0.0;
    } else if (std::isfinite(log_v)) {
      std::vector<double> residual_w;
      for (double lw : residual_logs) residual_w.push_back(std::exp(lw - log_v));
      const double share = log_v - std::log(static_cast<double>(draws));
      for (auto pick : systematic_sample(residual_w, draws, rng.uniform())) {
        selected.emplace_back(others[residual[pick]], share);
      }
    }
  }

  std::stable_sort(selected.begin(), selected.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  auto& out = result.mixture;
  out.components.reserve(selected.size());
  for (const auto& [idx, lw] : selected) {
    if (mixture.ancestor && idx == *mixture.ancestor && !out.ancestor) {
      out.ancestor = out.components.size();
    }
    GaussianComponent c = mixture.components[idx];
    c.log_weight = lw;
    out.components.push_back(std::move(c));
  }
  if (result.residual_dropped) out.normalize();
  return result;
}

}  // namespace jmls
