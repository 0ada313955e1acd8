#include "jmls/gibbs.hpp"

#include <stdexcept>
#include <string>

namespace jmls {

void GibbsConfig::validate(Dimensions dims) const {
  if (iterations <= burn_in) throw std::invalid_argument("iterations must exceed burn_in");
  if (thin < 1) throw std::invalid_argument("thin must be at least 1");
  if (max_components < 2) throw std::invalid_argument("max_components must be at least 2");
  prior.validate(dims);
  state_prior.validate(dims.m, dims.n_x);
  if (init_theta) {
    require_valid(*init_theta);
    if (!(init_theta->dims() == dims)) {
      throw std::invalid_argument("initial parameters do not match the problem dimensions");
    }
  }
}

std::size_t Chain::expected_length(std::size_t iterations, std::size_t burn_in, std::size_t thin) {
  if (iterations <= burn_in || thin == 0) return 0;
  return (iterations - burn_in + thin - 1) / thin;
}

GibbsFailure::GibbsFailure(std::size_t iteration, const std::string& what, Chain partial)
    : std::runtime_error("iteration " + std::to_string(iteration) + ": " + what),
      iteration_(iteration),
      partial_(std::move(partial)) {}

Rng gibbs_stream(std::uint64_t seed, std::size_t iteration, StreamPurpose purpose) {
  return Rng::stream(seed, static_cast<std::uint64_t>(purpose), iteration);
}

Chain run_particle_gibbs(const GibbsConfig& config, const Dataset& data, Dimensions dims,
                         const GibbsObserver& observer) {
  config.validate(dims);
  data.validate();
  if (data.n_u() != dims.n_u || data.n_y() != dims.n_y) {
    throw std::invalid_argument("data dimensions do not match the problem dimensions");
  }

  const std::size_t N = data.size();
  Chain chain;
  chain.dims = dims;
  chain.samples.reserve(Chain::expected_length(config.iterations, config.burn_in, config.thin));
  chain.log_likelihood.reserve(config.iterations);

  JmlsParams theta;
  if (config.init_theta) {
    theta = *config.init_theta;
  } else {
    Rng rng = gibbs_stream(config.seed, 0, StreamPurpose::initial_theta);
    theta = sample_parameters(config.prior, dims, rng);
  }

  std::vector<int> conditioned(N + 1);
  {
    Rng rng = gibbs_stream(config.seed, 0, StreamPurpose::initial_sequence);
    for (auto& z : conditioned) {
      z = static_cast<int>(rng() % static_cast<std::uint64_t>(dims.m));
    }
  }

  for (std::size_t l = 1; l <= config.iterations; ++l) {
    try {
      Rng filter_rng = gibbs_stream(config.seed, l, StreamPurpose::filter);
      const FilterHistory history = forward_filter(theta, data, config.state_prior,
                                                   config.max_components, conditioned, filter_rng);
      chain.log_likelihood.push_back(history.log_likelihood);
      chain.degenerate_reductions += history.degenerate_reductions;
      if (observer.on_log_likelihood) observer.on_log_likelihood(l, history.log_likelihood);

      Rng traj_rng = gibbs_stream(config.seed, l, StreamPurpose::trajectory);
      Trajectory traj = sample_trajectory(history, theta, traj_rng);

      const PosteriorHyper post =
          posterior_hyperparams(config.prior, sufficient_stats(traj, data, dims));
      Rng param_rng = gibbs_stream(config.seed, l, StreamPurpose::parameters);
      theta = sample_parameters(post, dims, param_rng);
      ++chain.accepted;

      conditioned = traj.z;
      const bool stored = l > config.burn_in && (l - config.burn_in - 1) % config.thin == 0;
      if (stored) {
        chain.samples.push_back(theta);
        chain.sample_iterations.push_back(l);
        if (config.store_trajectories) chain.trajectories.push_back(traj);
      }
      chain.last_trajectory = std::move(traj);
      if (observer.on_sample) observer.on_sample(l, theta, stored);
    } catch (const GibbsFailure&) {
      throw;
    } catch (const std::exception& e) {
      throw GibbsFailure(l, e.what(), std::move(chain));
    }
  }
  return chain;
}

}  // namespace jmls
