// Parallel kernels against their serial reference twins.

#include "jmls/analysis.hpp"
#include "jmls/backward_sampler.hpp"
#include "jmls/conjugate.hpp"
#include "jmls/forward_filter.hpp"
#include "jmls/kernels.hpp"

#include "support/systems.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace jmls;

namespace {

struct Setup {
  JmlsParams params;
  std::vector<DecorrelatedModel> models;
  std::vector<GaussianComponent> comps;
  Vector ubar, y;
};

Setup make_setup(std::size_t count, Index nx) {
  std::mt19937_64 g(1);
  Setup s;
  for (int i = 0; i < 3; ++i) s.params.models.push_back(systems::random_model(g, nx, 1, 1, true));
  s.params.T = systems::random_transition(g, 3);
  s.models = decorrelate(s.params);
  std::normal_distribution<double> n;
  for (std::size_t i = 0; i < count; ++i) {
    GaussianComponent c;
    c.mean = Vector::NullaryExpr(nx, [&] { return n(g); });
    c.cov = systems::random_spd(g, nx);
    c.model = static_cast<int>(i % 3);
    s.comps.push_back(std::move(c));
  }
  s.ubar = Vector::Constant(2, 0.3);
  s.y = Vector::Constant(1, 0.3);
  return s;
}

template <bool Parallel>
void BM_Correct(benchmark::State& state) {
  const auto s = make_setup(static_cast<std::size_t>(state.range(0)), 3);
  for (auto _ : state) {
    auto comps = s.comps;
    if constexpr (Parallel) {
      kernels::correct_components(comps, s.models, s.ubar, s.y);
    } else {
      kernels::reference::correct_components(comps, s.models, s.ubar, s.y);
    }
    benchmark::DoNotOptimize(comps.data());
  }
}

template <bool Parallel>
void BM_Propagate(benchmark::State& state) {
  const auto s = make_setup(static_cast<std::size_t>(state.range(0)), 3);
  for (auto _ : state) {
    auto out = Parallel ? kernels::propagate_moments(s.comps, s.models, s.ubar)
                        : kernels::reference::propagate_moments(s.comps, s.models, s.ubar);
    benchmark::DoNotOptimize(out.data());
  }
}

template <bool Parallel>
void BM_Smooth(benchmark::State& state) {
  const auto s = make_setup(static_cast<std::size_t>(state.range(0)), 3);
  const Vector x_next = Vector::Constant(3, 0.1);
  for (auto _ : state) {
    auto comps = s.comps;
    if constexpr (Parallel) {
      kernels::smooth_components(comps, s.models, s.ubar, x_next, 1, s.params.T);
    } else {
      kernels::reference::smooth_components(comps, s.models, s.ubar, x_next, 1, s.params.T);
    }
    benchmark::DoNotOptimize(comps.data());
  }
}

template <bool Parallel>
void BM_Statistics(benchmark::State& state) {
  const auto s = make_setup(1, 3);
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(2);
  std::vector<Vector> u(n, Vector(1));
  for (auto& v : u) v(0) = rng.normal();
  const auto sim = simulate(s.params, u, Vector::Zero(3), 0, rng);
  const Dataset data{u, sim.y};
  const Trajectory traj{sim.x, sim.z, {}};
  const Dimensions dims = s.params.dims();
  for (auto _ : state) {
    auto stats = Parallel ? kernels::sufficient_stats(traj, data, dims)
                          : kernels::reference::sufficient_stats(traj, data, dims);
    benchmark::DoNotOptimize(stats.transitions.data());
  }
}

template <bool Parallel>
void BM_ChainResponses(benchmark::State& state) {
  const auto s = make_setup(1, 3);
  const std::vector<JmlsParams> samples(static_cast<std::size_t>(state.range(0)), s.params);
  const auto grid = default_frequency_grid();
  for (auto _ : state) {
    auto r = Parallel ? chain_responses(samples, grid) : reference::chain_responses(samples, grid);
    benchmark::DoNotOptimize(r.data());
  }
}

void BM_ForwardFilter(benchmark::State& state) {
  const auto p = systems::example2();
  Rng rng(3);
  std::vector<Vector> u(1000, Vector(1));
  for (auto& v : u) v(0) = rng.normal();
  const Dataset data{u, simulate(p, u, Vector::Zero(3), 0, rng).y};
  const auto prior = HybridPrior::diffuse(3, 3);
  for (auto _ : state) {
    Rng r(4);
    auto h = forward_filter(p, data, prior, static_cast<std::size_t>(state.range(0)), {}, r);
    benchmark::DoNotOptimize(h.log_likelihood);
  }
}

}  // namespace

BENCHMARK(BM_Correct<true>)->Arg(15)->Arg(300);
BENCHMARK(BM_Correct<false>)->Arg(15)->Arg(300);
BENCHMARK(BM_Propagate<true>)->Arg(15)->Arg(300);
BENCHMARK(BM_Propagate<false>)->Arg(15)->Arg(300);
BENCHMARK(BM_Smooth<true>)->Arg(15)->Arg(300);
BENCHMARK(BM_Smooth<false>)->Arg(15)->Arg(300);
BENCHMARK(BM_Statistics<true>)->Arg(2000)->Arg(20000);
BENCHMARK(BM_Statistics<false>)->Arg(2000)->Arg(20000);
BENCHMARK(BM_ChainResponses<true>)->Arg(100);
BENCHMARK(BM_ChainResponses<false>)->Arg(100);
BENCHMARK(BM_ForwardFilter)->Arg(5)->Arg(20)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
