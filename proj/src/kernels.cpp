#include "jmls/kernels.hpp"

#include "jmls/conjugate.hpp"
#include "jmls/kalman.hpp"

#include <exception>
#include <string>

namespace jmls::kernels {

namespace {

// Runs body(i) for i in [0, n), in parallel when n is large enough. The first
// exception (by index) is rethrown after the loop.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
  std::vector<std::exception_ptr> errors(n);
  const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(static) if (n >= kParallelThreshold)
  for (long long i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

[[noreturn]] void rethrow_with_component(const NumericalError& e, std::size_t index, int model) {
  throw NumericalError(std::string(e.what()) + " at component " + std::to_string(index + 1) +
                       " of model " + std::to_string(model + 1));
}

void correct_one(std::span<GaussianComponent> comps, std::span<const DecorrelatedModel> models,
                 const Vector& ubar, const Vector& y, std::size_t i) {
  auto& c = comps[i];
  try {
    c = kalman_correct(c, models[static_cast<std::size_t>(c.model)], ubar, y);
  } catch (const NumericalError& e) {
    rethrow_with_component(e, i, c.model);
  }
}

void smooth_one(std::span<GaussianComponent> comps, std::span<const DecorrelatedModel> models,
                const Vector& ubar, const Vector& x_next, int z_next, const Matrix& T,
                std::size_t i) {
  auto& c = comps[i];
  try {
    c = kalman_smooth(c, models[static_cast<std::size_t>(c.model)], ubar, x_next,
                      T(z_next, c.model));
  } catch (const NumericalError& e) {
    rethrow_with_component(e, i, c.model);
  }
}

GaussianComponent propagate_one(const GaussianComponent& c,
                                std::span<const DecorrelatedModel> models, const Vector& ubar) {
  return kalman_predict(c, models[static_cast<std::size_t>(c.model)], ubar, 1.0);
}

void accumulate_step(SufficientStats& stats, const Trajectory& traj, const Dataset& data,
                     Dimensions dims, std::size_t k) {
  const auto i = static_cast<std::size_t>(traj.z[k]);
  const auto j = static_cast<std::size_t>(traj.z[k + 1]);
  if (traj.z[k] < 0 || traj.z[k] >= dims.m || traj.z[k + 1] < 0 || traj.z[k + 1] >= dims.m) {
    throw std::invalid_argument("sufficient_stats: model index out of range at step " +
                                std::to_string(k + 1));
  }
  Vector out(dims.n_y + dims.n_x), reg(dims.n_x + dims.n_u);
  out.head(dims.n_y) = data.y[k];
  out.tail(dims.n_x) = traj.x[k + 1];
  reg.head(dims.n_x) = traj.x[k];
  reg.tail(dims.n_u) = data.u[k];
  auto& s = stats.models[i];
  s.Phi.noalias() += out * out.transpose();
  s.Psi.noalias() += out * reg.transpose();
  s.Sigma.noalias() += reg * reg.transpose();
  s.count += 1;
  stats.transitions(static_cast<Index>(j), static_cast<Index>(i)) += 1.0;
}

void check_stats_inputs(const Trajectory& traj, const Dataset& data) {
  if (traj.z.size() != data.size() + 1 || traj.x.size() != data.size() + 1) {
    throw std::invalid_argument("sufficient_stats: trajectory length must be N + 1");
  }
}

}  // namespace

void correct_components(std::span<GaussianComponent> comps,
                        std::span<const DecorrelatedModel> models, const Vector& ubar,
                        const Vector& y) {
  parallel_for(comps.size(), [&](std::size_t i) { correct_one(comps, models, ubar, y, i); });
}

std::vector<GaussianComponent> propagate_moments(std::span<const GaussianComponent> comps,
                                                 std::span<const DecorrelatedModel> models,
                                                 const Vector& ubar) {
  std::vector<GaussianComponent> out(comps.size());
  parallel_for(comps.size(), [&](std::size_t i) { out[i] = propagate_one(comps[i], models, ubar); });
  return out;
}

void smooth_components(std::span<GaussianComponent> comps,
                       std::span<const DecorrelatedModel> models, const Vector& ubar,
                       const Vector& x_next, int z_next, const Matrix& T) {
  parallel_for(comps.size(), [&](std::size_t i) {
    smooth_one(comps, models, ubar, x_next, z_next, T, i);
  });
}

SufficientStats sufficient_stats(const Trajectory& traj, const Dataset& data, Dimensions dims) {
  check_stats_inputs(traj, data);
  const std::size_t N = data.size();
  const std::size_t blocks = (N + kReductionBlock - 1) / kReductionBlock;
  std::vector<SufficientStats> partial(blocks, SufficientStats::zeros(dims));
  parallel_for(blocks, [&](std::size_t b) {
    const std::size_t end = std::min(N, (b + 1) * kReductionBlock);
    for (std::size_t k = b * kReductionBlock; k < end; ++k) {
      accumulate_step(partial[b], traj, data, dims, k);
    }
  });
  SufficientStats total = SufficientStats::zeros(dims);
  for (const auto& p : partial) total.merge(p);
  return total;
}

namespace reference {

void correct_components(std::span<GaussianComponent> comps,
                        std::span<const DecorrelatedModel> models, const Vector& ubar,
                        const Vector& y) {
  for (std::size_t i = 0; i < comps.size(); ++i) correct_one(comps, models, ubar, y, i);
}

std::vector<GaussianComponent> propagate_moments(std::span<const GaussianComponent> comps,
                                                 std::span<const DecorrelatedModel> models,
                                                 const Vector& ubar) {
  std::vector<GaussianComponent> out;
  out.reserve(comps.size());
  for (const auto& c : comps) out.push_back(propagate_one(c, models, ubar));
  return out;
}

void smooth_components(std::span<GaussianComponent> comps,
                       std::span<const DecorrelatedModel> models, const Vector& ubar,
                       const Vector& x_next, int z_next, const Matrix& T) {
  for (std::size_t i = 0; i < comps.size(); ++i) {
    smooth_one(comps, models, ubar, x_next, z_next, T, i);
  }
}

SufficientStats sufficient_stats(const Trajectory& traj, const Dataset& data, Dimensions dims) {
  check_stats_inputs(traj, data);
  SufficientStats total = SufficientStats::zeros(dims);
  for (std::size_t k = 0; k < data.size(); ++k) accumulate_step(total, traj, data, dims, k);
  return total;
}

}  // namespace reference
}  // namespace jmls::kernels
