#include "jmls/conjugate.hpp"

#include "jmls/distributions.hpp"
#include "jmls/kernels.hpp"
#include "jmls/linalg.hpp"

#include <stdexcept>
#include <string>

namespace jmls {

HyperParams HyperParams::isotropic(Dimensions dims, double v, double lambda, double nu,
                                   double alpha_value) {
  const Index rows = dims.n_y + dims.n_x, cols = dims.n_x + dims.n_u;
  HyperParams h;
  for (Index i = 0; i < dims.m; ++i) {
    h.models.push_back({Matrix::Zero(rows, cols), v * Matrix::Identity(cols, cols),
                        lambda * Matrix::Identity(rows, rows), nu});
  }
  h.alpha = Matrix::Constant(dims.m, dims.m, alpha_value);
  return h;
}

void HyperParams::validate(Dimensions dims) const {
  const Index rows = dims.n_y + dims.n_x, cols = dims.n_x + dims.n_u;
  if (static_cast<Index>(models.size()) != dims.m) {
    throw std::invalid_argument("prior: expected " + std::to_string(dims.m) + " models");
  }
  for (std::size_t i = 0; i < models.size(); ++i) {
    const auto& h = models[i];
    const std::string tag = "prior model " + std::to_string(i + 1) + ": ";
    if (h.M.rows() != rows || h.M.cols() != cols) throw std::invalid_argument(tag + "M has wrong size");
    if (h.V.rows() != cols || h.V.cols() != cols) throw std::invalid_argument(tag + "V has wrong size");
    if (h.Lambda.rows() != rows || h.Lambda.cols() != rows) {
      throw std::invalid_argument(tag + "Lambda has wrong size");
    }
    if (!is_pd(h.V)) throw std::invalid_argument(tag + "V is not positive definite");
    if (!is_pd(h.Lambda)) throw std::invalid_argument(tag + "Lambda is not positive definite");
    if (!(h.nu > static_cast<double>(rows) - 1.0)) {
      throw std::invalid_argument(tag + "nu must exceed n - 1");
    }
  }
  if (alpha.rows() != dims.m || alpha.cols() != dims.m) {
    throw std::invalid_argument("prior: alpha has wrong size");
  }
  if (!(alpha.array() > 0.0).all()) throw std::invalid_argument("prior: alpha must be positive");
}

SufficientStats SufficientStats::zeros(Dimensions dims) {
  const Index rows = dims.n_y + dims.n_x, cols = dims.n_x + dims.n_u;
  SufficientStats s;
  s.models.assign(static_cast<std::size_t>(dims.m),
                  {Matrix::Zero(rows, rows), Matrix::Zero(rows, cols), Matrix::Zero(cols, cols), 0});
  s.transitions = Matrix::Zero(dims.m, dims.m);
  return s;
}

void SufficientStats::merge(const SufficientStats& other) {
  for (std::size_t i = 0; i < models.size(); ++i) {
    models[i].Phi += other.models[i].Phi;
    models[i].Psi += other.models[i].Psi;
    models[i].Sigma += other.models[i].Sigma;
    models[i].count += other.models[i].count;
  }
  transitions += other.transitions;
}

SufficientStats sufficient_stats(const Trajectory& traj, const Dataset& data, Dimensions dims) {
  return kernels::sufficient_stats(traj, data, dims);
}

namespace {

ModelHyper update_model(const ModelHyper& prior, const ModelStats& stats) {
  if (stats.count == 0) return prior;

  const Index p = prior.V.cols(), n = prior.Lambda.rows();
  const auto v_llt = cholesky_with_jitter(prior.V, "prior V");
  const Matrix v_inv = v_llt.solve(Matrix::Identity(p, p));
  const Matrix sigma_bar = symmetrize(stats.Sigma + v_inv);
  const Matrix psi_bar = stats.Psi + prior.M * v_inv;
  const Matrix phi_bar = symmetrize(stats.Phi + prior.M * v_inv * prior.M.transpose());

  const auto s_llt = cholesky_with_jitter(sigma_bar, "posterior Sigma");
  ModelHyper post;
  post.M = s_llt.solve(psi_bar.transpose()).transpose();
  post.V = symmetrize(s_llt.solve(Matrix::Identity(p, p)));
  post.nu = prior.nu + static_cast<double>(stats.count);

  // Lambda + Phi_bar - Psi_bar Sigma_bar^{-1} Psi_bar^T is the Schur complement
  // of the joint block [[Sigma_bar, Psi_bar^T], [Psi_bar, Phi_bar + Lambda]];
  // its Cholesky trailing block gives a PD factor directly.
  Matrix joint(p + n, p + n);
  joint.topLeftCorner(p, p) = sigma_bar;
  joint.topRightCorner(p, n) = psi_bar.transpose();
  joint.bottomLeftCorner(n, p) = psi_bar;
  joint.bottomRightCorner(n, n) = phi_bar + prior.Lambda;
  Eigen::LLT<Matrix> joint_llt(symmetrize(joint));
  if (joint_llt.info() == Eigen::Success) {
    const Matrix L22 = Matrix(joint_llt.matrixL()).bottomRightCorner(n, n);
    post.Lambda = symmetrize(L22 * L22.transpose());
  } else {
    post.Lambda = symmetrize(prior.Lambda + phi_bar - post.M * sigma_bar * post.M.transpose());
    if (!is_pd(post.Lambda)) throw NumericalError("posterior Lambda is not positive definite");
  }
  return post;
}

}  // namespace

PosteriorHyper posterior_hyperparams(const PriorHyper& prior, const SufficientStats& stats) {
  if (prior.models.size() != stats.models.size()) {
    throw std::invalid_argument("posterior_hyperparams: model count mismatch");
  }
  PosteriorHyper post;
  post.models.reserve(prior.models.size());
  for (std::size_t i = 0; i < prior.models.size(); ++i) {
    post.models.push_back(update_model(prior.models[i], stats.models[i]));
  }
  post.alpha = prior.alpha + stats.transitions;
  return post;
}

JmlsParams sample_parameters(const HyperParams& hyper, Dimensions dims, Rng& rng) {
  hyper.validate(dims);
  std::vector<Matrix> pis;
  pis.reserve(hyper.models.size());
  for (const auto& h : hyper.models) pis.push_back(sample_inverse_wishart({h.Lambda, h.nu}, rng));

  JmlsParams theta;
  for (std::size_t i = 0; i < hyper.models.size(); ++i) {
    const auto& h = hyper.models[i];
    const Matrix gamma = sample_matrix_normal({h.M, pis[i], h.V}, rng);
    theta.models.push_back(ModelMatrices::from_blocks(gamma, pis[i], dims.n_x, dims.n_u, dims.n_y));
  }
  theta.T = sample_dirichlet_columns(hyper.alpha, rng);
  return theta;
}

}  // namespace jmls
