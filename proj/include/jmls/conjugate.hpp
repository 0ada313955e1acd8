#pragma once

#include "jmls/backward_sampler.hpp"
#include "jmls/model.hpp"
#include "jmls/rng.hpp"

#include <vector>

namespace jmls {

/// Matrix-Normal / Inverse-Wishart hyperparameters of one mode. Gamma is
/// (n_y + n_x) x (n_x + n_u), Pi is (n_y + n_x) square.
struct ModelHyper {
  Matrix M;
  Matrix V;
  Matrix Lambda;
  double nu = 0.0;
};

/// Conjugate hyperparameters for the whole parameter object. The same layout
/// serves as prior and as posterior.
struct HyperParams {
  std::vector<ModelHyper> models;
  Matrix alpha;  // m x m Dirichlet concentrations, column j for T(:, j)

  /// M = 0, V = v I, Lambda = lambda I, nu, alpha filled with `alpha_value`.
  static HyperParams isotropic(Dimensions dims, double v, double lambda, double nu,
                               double alpha_value = 1.0);

  void validate(Dimensions dims) const;
};

using PriorHyper = HyperParams;
using PosteriorHyper = HyperParams;

struct ModelStats {
  Matrix Phi;    // sum [y; x'] [y; x']^T
  Matrix Psi;    // sum [y; x'] [x; u]^T
  Matrix Sigma;  // sum [x; u] [x; u]^T
  std::size_t count = 0;
};

struct SufficientStats {
  std::vector<ModelStats> models;
  Matrix transitions;  // (j, i): number of k with z_{k+1} = j and z_k = i

  static SufficientStats zeros(Dimensions dims);
  /// Adds another set of statistics (associative, used by blocked reductions).
  void merge(const SufficientStats& other);
};

/// Statistics of the original (non-decorrelated) model form over k = 1..N.
SufficientStats sufficient_stats(const Trajectory& traj, const Dataset& data, Dimensions dims);

PosteriorHyper posterior_hyperparams(const PriorHyper& prior, const SufficientStats& stats);

/// Pi_i ~ IW, Gamma_i | Pi_i ~ MN, columns of T ~ Dirichlet.
JmlsParams sample_parameters(const HyperParams& hyper, Dimensions dims, Rng& rng);

}  // namespace jmls
