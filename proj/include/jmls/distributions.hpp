#pragma once

#include "jmls/rng.hpp"
#include "jmls/types.hpp"

#include <span>

namespace jmls {

struct MatrixNormalParams {
  Matrix mean;        // n x p
  Matrix row_cov;     // n x n
  Matrix column_cov;  // p x p
};

struct InverseWishartParams {
  Matrix scale;
  double dof = 0.0;
};

/// log N(x | mu, P), evaluated through a Cholesky factor.
double log_mvn_pdf(const Vector& x, const Vector& mu, const Matrix& P);

Vector sample_mvn(const Vector& mean, const Matrix& cov, Rng& rng);

/// Gamma(shape, scale = 1). Marsaglia-Tsang for shape >= 1; shape < 1 uses
/// G(a) = G(a + 1) U^{1/a}.
double sample_gamma(double shape, Rng& rng);

/// Gamma = M + L_row H L_col^T with L lower Cholesky factors, i.e. the upper
/// factor transposed on the left and the upper factor on the right.
Matrix sample_matrix_normal(const MatrixNormalParams& params, Rng& rng);

/// Deterministic core of sample_matrix_normal for a given standard-normal H.
Matrix matrix_normal_transform(const MatrixNormalParams& params, const Matrix& standard_normal);

/// Bartlett decomposition of Wishart(scale^{-1}, dof), inverted. Requires dof > n - 1.
Matrix sample_inverse_wishart(const InverseWishartParams& params, Rng& rng);

/// Each column j is Dirichlet(alpha(:, j)); returns a column-stochastic matrix.
Matrix sample_dirichlet_columns(const Matrix& alpha, Rng& rng);

/// Inverse-CDF draw from normalized weights (sum 1 within 1e-9). Zero based.
std::size_t sample_categorical(std::span<const double> weights, Rng& rng);

}  // namespace jmls
