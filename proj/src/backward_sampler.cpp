#include "jmls/backward_sampler.hpp"

#include "jmls/distributions.hpp"
#include "jmls/kernels.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace jmls {

namespace {

struct Draw {
  int z;
  std::size_t b;
  Vector x;
};

// z from the per-mode masses, then b within z, then x ~ N(mu_b, P_b).
Draw sample_hybrid(const HybridMixture& mix, int num_models, Rng& rng) {
  const double top = [&] {
    double t = -std::numeric_limits<double>::infinity();
    for (const auto& c : mix.components) t = std::max(t, c.log_weight);
    return t;
  }();
  if (!std::isfinite(top)) throw NumericalError("cannot sample from a mixture with no mass");

  std::vector<double> w(mix.size());
  std::vector<double> mass(static_cast<std::size_t>(num_models), 0.0);
  for (std::size_t i = 0; i < mix.size(); ++i) {
    w[i] = std::exp(mix.components[i].log_weight - top);
    mass[static_cast<std::size_t>(mix.components[i].model)] += w[i];
  }
  double total = 0.0;
  for (double m : mass) total += m;
  for (double& m : mass) m /= total;
  const int z = static_cast<int>(sample_categorical(mass, rng));

  std::vector<std::size_t> members;
  std::vector<double> within;
  double within_total = 0.0;
  for (std::size_t i = 0; i < mix.size(); ++i) {
    if (mix.components[i].model != z) continue;
    members.push_back(i);
    within.push_back(w[i]);
    within_total += w[i];
  }
  for (double& v : within) v /= within_total;
  const std::size_t b = members[sample_categorical(within, rng)];
  const auto& comp = mix.components[b];
  return {z, b, sample_mvn(comp.mean, comp.cov, rng)};
}

}  // namespace

HybridMixture backward_smooth_step(const HybridMixture& filtered, const Vector& x_next, int z_next,
                                   std::span<const DecorrelatedModel> models, const Vector& ubar,
                                   const Matrix& T) {
  HybridMixture out = filtered;
  out.ancestor.reset();
  kernels::smooth_components(out.components, models, ubar, x_next, z_next, T);
  if (!std::isfinite(out.normalize())) {
    throw NumericalError("backward pass: no component is compatible with the sampled successor");
  }
  return out;
}

Trajectory sample_trajectory(const FilterHistory& history, const JmlsParams& params, Rng& rng) {
  const std::size_t N = history.steps();
  const int m = static_cast<int>(params.num_models());
  if (N == 0) throw std::invalid_argument("sample_trajectory: empty history");

  Trajectory traj;
  traj.x.resize(N + 1);
  traj.z.resize(N + 1);
  traj.b.resize(N + 1);

  Draw d = sample_hybrid(history.predicted_final, m, rng);
  traj.z[N] = d.z;
  traj.b[N] = d.b;
  traj.x[N] = std::move(d.x);

  for (std::size_t k = N; k-- > 0;) {
    HybridMixture smoothed;
    try {
      if (history.dead[k]) {
        HybridMixture filtered = history.filtered[k];
        filtered.components[*history.dead[k]].log_weight =
            -std::numeric_limits<double>::infinity();
        smoothed = backward_smooth_step(filtered, traj.x[k + 1], traj.z[k + 1], history.models,
                                        history.augmented_inputs[k], history.T);
      } else {
        smoothed = backward_smooth_step(history.filtered[k], traj.x[k + 1], traj.z[k + 1],
                                        history.models, history.augmented_inputs[k], history.T);
      }
    } catch (const NumericalError& e) {
      throw NumericalError(std::string(e.what()) + " at step " + std::to_string(k + 1));
    }
    d = sample_hybrid(smoothed, m, rng);
    traj.z[k] = d.z;
    traj.b[k] = d.b;
    traj.x[k] = std::move(d.x);
  }
  return traj;
}

}  // namespace jmls
