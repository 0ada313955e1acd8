#include "jmls/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace jmls {

Eigen::LLT<Matrix> cholesky_with_jitter(const Matrix& p, std::string_view context) {
  Eigen::LLT<Matrix> llt(p);
  if (llt.info() == Eigen::Success) return llt;

  const double n = static_cast<double>(std::max<Index>(p.rows(), 1));
  double jitter = 1e-12 * p.trace() / n;
  if (!(jitter > 0.0)) jitter = 1e-12;
  Matrix jittered = p;
  jittered.diagonal().array() += jitter;
  llt.compute(jittered);
  if (llt.info() != Eigen::Success) {
    std::string msg = "matrix is not positive definite";
    if (!context.empty()) msg += " (" + std::string(context) + ")";
    throw NumericalError(msg);
  }
  return llt;
}

Matrix lower_cholesky(const Matrix& p, std::string_view context) {
  return cholesky_with_jitter(p, context).matrixL();
}

double log_det(const Eigen::LLT<Matrix>& llt) {
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

Matrix psd_factor(const Matrix& p) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrize(p));
  Vector roots = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * roots.asDiagonal();
}

bool is_psd(const Matrix& p, double rel_tol) {
  if (p.rows() != p.cols()) return false;
  if (p.size() == 0) return true;
  if (!p.allFinite()) return false;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrize(p), Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff() >= -rel_tol * p.norm();
}

bool is_pd(const Matrix& p) {
  if (p.rows() != p.cols() || !p.allFinite()) return false;
  Eigen::LLT<Matrix> llt(symmetrize(p));
  return llt.info() == Eigen::Success;
}

double log_sum_exp(std::span<const double> values) {
  double top = -std::numeric_limits<double>::infinity();
  for (double v : values) top = std::max(top, v);
  if (!std::isfinite(top)) return top;
  double acc = 0.0;
  for (double v : values) acc += std::exp(v - top);
  return top + std::log(acc);
}

}  // namespace jmls
