#pragma once

// Data-parallel inner loops. Each kernel has an OpenMP version used by the
// library and a serial twin in `reference` that the tests and the benchmark
// compare against. Per-element maps are bit-identical to their serial twins.
// The statistics reduction sums over a fixed block partition, so its result
// does not depend on the thread count; the reference sums in plain order and
// agrees to rounding.

#include "jmls/mixture.hpp"
#include "jmls/model.hpp"

#include <span>
#include <vector>

namespace jmls {
struct SufficientStats;
struct Trajectory;
}  // namespace jmls

namespace jmls::kernels {

/// Loops shorter than this run serially even in the parallel kernels.
inline constexpr std::size_t kParallelThreshold = 64;

/// Block length used by the deterministic statistics reduction.
inline constexpr std::size_t kReductionBlock = 256;

void correct_components(std::span<GaussianComponent> comps,
                        std::span<const DecorrelatedModel> models, const Vector& ubar,
                        const Vector& y);

/// Time-updates mean and covariance of every component under its own mode.
/// Weights and mode labels are copied unchanged.
std::vector<GaussianComponent> propagate_moments(std::span<const GaussianComponent> comps,
                                                 std::span<const DecorrelatedModel> models,
                                                 const Vector& ubar);

void smooth_components(std::span<GaussianComponent> comps,
                       std::span<const DecorrelatedModel> models, const Vector& ubar,
                       const Vector& x_next, int z_next, const Matrix& T);

SufficientStats sufficient_stats(const Trajectory& traj, const Dataset& data, Dimensions dims);

namespace reference {

void correct_components(std::span<GaussianComponent> comps,
                        std::span<const DecorrelatedModel> models, const Vector& ubar,
                        const Vector& y);

std::vector<GaussianComponent> propagate_moments(std::span<const GaussianComponent> comps,
                                                 std::span<const DecorrelatedModel> models,
                                                 const Vector& ubar);

void smooth_components(std::span<GaussianComponent> comps,
                       std::span<const DecorrelatedModel> models, const Vector& ubar,
                       const Vector& x_next, int z_next, const Matrix& T);

SufficientStats sufficient_stats(const Trajectory& traj, const Dataset& data, Dimensions dims);

}  // namespace reference
}  // namespace jmls::kernels
