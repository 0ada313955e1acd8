#pragma once

#include "jmls/backward_sampler.hpp"
#include "jmls/conjugate.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace jmls {

struct GibbsConfig {
  std::size_t iterations = 1000;
  std::size_t burn_in = 100;
  std::size_t thin = 1;
  std::size_t max_components = 5;
  std::uint64_t seed = 1;
  std::optional<JmlsParams> init_theta;
  PriorHyper prior;
  HybridPrior state_prior;
  bool store_trajectories = false;

  /// Throws std::invalid_argument.
  void validate(Dimensions dims) const;
};

struct Chain {
  Dimensions dims;
  std::vector<JmlsParams> samples;
  std::vector<std::size_t> sample_iterations;  // iteration l that produced theta^{l+1}
  std::vector<double> log_likelihood;          // log p(y | theta^l), every iteration
  std::vector<Trajectory> trajectories;        // thinned, only when requested
  Trajectory last_trajectory;
  std::size_t accepted = 0;  // every Gibbs move is accepted; kept for diagnostics
  std::size_t degenerate_reductions = 0;

  static std::size_t expected_length(std::size_t iterations, std::size_t burn_in,
                                     std::size_t thin);
};

/// Called after every iteration; `stored` is set when the schedule keeps the sample.
struct GibbsObserver {
  std::function<void(std::size_t iteration, const JmlsParams& theta, bool stored)> on_sample;
  std::function<void(std::size_t iteration, double log_likelihood)> on_log_likelihood;
};

class GibbsFailure : public std::runtime_error {
 public:
  GibbsFailure(std::size_t iteration, const std::string& what, Chain partial);
  std::size_t iteration() const { return iteration_; }
  const Chain& partial_chain() const { return partial_; }

 private:
  std::size_t iteration_;
  Chain partial_;
};

/// Random stream purposes; every draw is keyed by (seed, iteration, purpose).
enum class StreamPurpose : std::uint64_t {
  initial_theta = 0,
  initial_sequence = 1,
  filter = 2,
  trajectory = 3,
  parameters = 4,
};

Rng gibbs_stream(std::uint64_t seed, std::size_t iteration, StreamPurpose purpose);

Chain run_particle_gibbs(const GibbsConfig& config, const Dataset& data, Dimensions dims,
                         const GibbsObserver& observer = {});

}  // namespace jmls
