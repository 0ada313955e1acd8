#pragma once

#include "jmls/rng.hpp"
#include "jmls/types.hpp"

#include <string>
#include <vector>

namespace jmls {

struct Dimensions {
  Index n_x = 0;
  Index n_u = 0;
  Index n_y = 0;
  Index m = 0;

  friend bool operator==(const Dimensions&, const Dimensions&) = default;
};

/// One mode of the switched system, stored in split form:
///   [y_k; x_{k+1}] = [[C, D], [A, B]] [x_k; u_k] + w_k,  w_k ~ N(0, [[R, S^T], [S, Q]]).
struct ModelMatrices {
  Matrix A, B, C, D;
  Matrix Q, R, S;

  Index n_x() const { return A.rows(); }
  Index n_u() const { return B.cols(); }
  Index n_y() const { return C.rows(); }

  /// Stacked system matrix [[C, D], [A, B]] of size (n_y + n_x) x (n_x + n_u).
  Matrix gamma() const;
  /// Stacked noise covariance [[R, S^T], [S, Q]].
  Matrix pi() const;

  static ModelMatrices from_blocks(const Matrix& gamma, const Matrix& pi, Index n_x, Index n_u,
                                   Index n_y);

  /// Copy with Q and R replaced by their symmetric parts.
  ModelMatrices symmetrized() const;
};

/// Parameter object: per-mode matrices plus the column-stochastic transition
/// matrix, T(i, j) = P(z_{k+1} = i | z_k = j).
struct JmlsParams {
  std::vector<ModelMatrices> models;
  Matrix T;

  Index num_models() const { return static_cast<Index>(models.size()); }
  Dimensions dims() const;
};

/// Empty result means valid.
std::vector<std::string> validate_params(const JmlsParams& params);

/// Throws std::invalid_argument listing every violation.
void require_valid(const JmlsParams& params);

/// Mode with the measurement/process cross covariance removed. Consumes the
/// augmented input [u_k; y_k].
struct DecorrelatedModel {
  Matrix A, B, C, D, Q, R;
};

std::vector<DecorrelatedModel> decorrelate(const JmlsParams& params);

struct Dataset {
  std::vector<Vector> u;
  std::vector<Vector> y;

  std::size_t size() const { return y.size(); }
  Index n_u() const { return u.empty() ? 0 : u.front().size(); }
  Index n_y() const { return y.empty() ? 0 : y.front().size(); }

  /// [u_k; y_k] for zero-based k.
  Vector augmented_input(std::size_t k) const;

  /// Throws std::invalid_argument on empty or ragged data.
  void validate() const;
};

/// Gaussian-mixture prior over (x_1, z_1); model indices are zero based.
struct HybridPrior {
  struct Entry {
    int model = 0;
    double weight = 0.0;
    Vector mean;
    Matrix cov;
  };
  std::vector<Entry> entries;

  /// One component per model, weight 1/m, zero mean, covariance 10 I.
  static HybridPrior diffuse(Index m, Index n_x, double variance = 10.0);

  void validate(Index m, Index n_x) const;
};

struct SimulationResult {
  std::vector<Vector> y;  // N
  std::vector<Vector> x;  // N + 1
  std::vector<int> z;     // N + 1, zero based
};

/// Simulates N = inputs.size() steps starting from the hybrid state (x1, z1).
SimulationResult simulate(const JmlsParams& params, const std::vector<Vector>& inputs,
                          const Vector& x1, int z1, Rng& rng);

/// Stationary distribution of a column-stochastic matrix (power iteration).
Vector stationary_distribution(const Matrix& T);

}  // namespace jmls
