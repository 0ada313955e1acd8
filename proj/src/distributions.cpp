#include "jmls/distributions.hpp"

#include "jmls/linalg.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace jmls {

namespace {

double marsaglia_tsang(double shape, Rng& rng) {
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = rng.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

// log of a Gamma(shape, 1) draw; stays finite for very small shapes.
double log_sample_gamma(double shape, Rng& rng) {
  if (!(shape > 0.0) || !std::isfinite(shape)) {
    throw std::invalid_argument("gamma shape must be positive and finite");
  }
  if (shape >= 1.0) return std::log(marsaglia_tsang(shape, rng));
  const double g = marsaglia_tsang(shape + 1.0, rng);
  return std::log(g) + std::log(rng.uniform()) / shape;
}

}  // namespace

double log_mvn_pdf(const Vector& x, const Vector& mu, const Matrix& P) {
  if (x.size() != mu.size() || P.rows() != x.size() || P.cols() != x.size()) {
    throw std::invalid_argument("log_mvn_pdf: dimension mismatch");
  }
  const auto llt = cholesky_with_jitter(P, "log_mvn_pdf");
  const Vector z = llt.matrixL().solve(x - mu);
  const double n = static_cast<double>(x.size());
  return -0.5 * (n * std::log(2.0 * std::numbers::pi) + log_det(llt) + z.squaredNorm());
}

Vector sample_mvn(const Vector& mean, const Matrix& cov, Rng& rng) {
  const Matrix L = lower_cholesky(cov, "sample_mvn");
  Vector h(mean.size());
  for (Index i = 0; i < h.size(); ++i) h(i) = rng.normal();
  return mean + L * h;
}

double sample_gamma(double shape, Rng& rng) { return std::exp(log_sample_gamma(shape, rng)); }

Matrix matrix_normal_transform(const MatrixNormalParams& params, const Matrix& standard_normal) {
  const Index n = params.mean.rows(), p = params.mean.cols();
  if (params.row_cov.rows() != n || params.row_cov.cols() != n || params.column_cov.rows() != p ||
      params.column_cov.cols() != p || standard_normal.rows() != n ||
      standard_normal.cols() != p) {
    throw std::invalid_argument("matrix normal: dimension mismatch");
  }
  const Matrix row_factor = lower_cholesky(params.row_cov, "matrix normal row covariance");
  const Matrix col_factor = lower_cholesky(params.column_cov, "matrix normal column covariance");
  return params.mean + row_factor * standard_normal * col_factor.transpose();
}

Matrix sample_matrix_normal(const MatrixNormalParams& params, Rng& rng) {
  Matrix h(params.mean.rows(), params.mean.cols());
  for (Index j = 0; j < h.cols(); ++j) {
    for (Index i = 0; i < h.rows(); ++i) h(i, j) = rng.normal();
  }
  return matrix_normal_transform(params, h);
}

Matrix sample_inverse_wishart(const InverseWishartParams& params, Rng& rng) {
  const Index n = params.scale.rows();
  if (params.scale.cols() != n) throw std::invalid_argument("inverse Wishart: scale not square");
  if (!(params.dof > static_cast<double>(n) - 1.0)) {
    throw std::invalid_argument("inverse Wishart: degrees of freedom must exceed n - 1");
  }
  const Matrix U = lower_cholesky(symmetrize(params.scale), "inverse Wishart scale");

  // Bartlett factor of Wishart(I, dof).
  Matrix bartlett = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    const double chi2 = 2.0 * sample_gamma(0.5 * (params.dof - static_cast<double>(i)), rng);
    bartlett(i, i) = std::sqrt(chi2);
    for (Index j = 0; j < i; ++j) bartlett(i, j) = rng.normal();
  }
  // Pi = (U A^{-T}) (U A^{-T})^T where Lambda = U U^T.
  const Matrix xt = bartlett.triangularView<Eigen::Lower>().solve(U.transpose());
  return symmetrize(xt.transpose() * xt);
}

Matrix sample_dirichlet_columns(const Matrix& alpha, Rng& rng) {
  for (Index j = 0; j < alpha.cols(); ++j) {
    for (Index i = 0; i < alpha.rows(); ++i) {
      if (!(alpha(i, j) > 0.0)) {
        throw std::invalid_argument("Dirichlet concentrations must be positive");
      }
    }
  }
  Matrix T(alpha.rows(), alpha.cols());
  std::vector<double> logs(static_cast<std::size_t>(alpha.rows()));
  for (Index j = 0; j < alpha.cols(); ++j) {
    for (Index i = 0; i < alpha.rows(); ++i) {
      logs[static_cast<std::size_t>(i)] = log_sample_gamma(alpha(i, j), rng);
    }
    const double norm = log_sum_exp(logs);
    for (Index i = 0; i < alpha.rows(); ++i) {
      T(i, j) = std::exp(logs[static_cast<std::size_t>(i)] - norm);
    }
  }
  return T;
}

std::size_t sample_categorical(std::span<const double> weights, Rng& rng) {
  if (weights.empty()) throw std::invalid_argument("categorical: no weights");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw std::invalid_argument("categorical: negative weight");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("categorical: weights do not sum to one");
  }
  const double target = rng.uniform() * total;
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    cumulative += weights[i];
    last_positive = i;
    if (target < cumulative) return i;
  }
  return last_positive;
}

}  // namespace jmls
