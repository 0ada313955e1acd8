#pragma once

#include "jmls/types.hpp"

#include <span>
#include <string_view>

namespace jmls {

inline Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

/// Cholesky factorization of a symmetric matrix. On failure one retry is made
/// with 1e-12 * tr(P) / n added to the diagonal; a second failure throws
/// NumericalError carrying `context`.
Eigen::LLT<Matrix> cholesky_with_jitter(const Matrix& p, std::string_view context = {});

/// Lower Cholesky factor L with L L^T = P (same jitter policy).
Matrix lower_cholesky(const Matrix& p, std::string_view context = {});

double log_det(const Eigen::LLT<Matrix>& llt);

/// Symmetric square root-like factor G with G G^T = P for PSD P (eigen based,
/// negative eigenvalues clamped to zero).
Matrix psd_factor(const Matrix& p);

/// Minimum eigenvalue >= -rel_tol * ||P||_F.
bool is_psd(const Matrix& p, double rel_tol = 1e-10);

/// Strict positive definiteness via Cholesky.
bool is_pd(const Matrix& p);

double log_sum_exp(std::span<const double> values);

}  // namespace jmls
