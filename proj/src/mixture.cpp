#include "jmls/mixture.hpp"

#include "jmls/linalg.hpp"

#include <cmath>
#include <limits>

namespace jmls {

std::size_t HybridMixture::count(int model) const {
  std::size_t n = 0;
  for (const auto& c : components) n += (c.model == model);
  return n;
}

double HybridMixture::log_total_weight() const {
  std::vector<double> lw;
  lw.reserve(components.size());
  for (const auto& c : components) lw.push_back(c.log_weight);
  return log_sum_exp(lw);
}

double HybridMixture::normalize() {
  const double total = log_total_weight();
  if (!std::isfinite(total)) return total;
  for (auto& c : components) c.log_weight -= total;
  return total;
}

std::vector<double> HybridMixture::weights() const {
  std::vector<double> w;
  w.reserve(components.size());
  for (const auto& c : components) w.push_back(std::exp(c.log_weight));
  return w;
}

std::vector<double> HybridMixture::model_masses(int num_models) const {
  std::vector<double> mass(static_cast<std::size_t>(num_models), 0.0);
  for (const auto& c : components) mass[static_cast<std::size_t>(c.model)] += std::exp(c.log_weight);
  return mass;
}

}  // namespace jmls
