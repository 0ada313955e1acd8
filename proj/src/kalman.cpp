#include "jmls/kalman.hpp"

#include "jmls/linalg.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace jmls {

namespace {

// log N(r | 0, S) from a Cholesky factor of S.
double log_gaussian_residual(const Eigen::LLT<Matrix>& llt, const Vector& residual) {
  const Vector w = llt.matrixL().solve(residual);
  const double n = static_cast<double>(residual.size());
  return -0.5 * (n * std::log(2.0 * std::numbers::pi) + log_det(llt) + w.squaredNorm());
}

double log_or_neg_inf(double t) {
  return t > 0.0 ? std::log(t) : -std::numeric_limits<double>::infinity();
}

}  // namespace

GaussianComponent kalman_correct(const GaussianComponent& comp, const DecorrelatedModel& model,
                                 const Vector& ubar, const Vector& y) {
  const Vector eta = model.C * comp.mean + model.D * ubar;
  const Matrix CP = model.C * comp.cov;
  const Matrix xi = symmetrize(CP * model.C.transpose() + model.R);
  const auto llt = cholesky_with_jitter(xi, "innovation covariance");
  const Vector innovation = y - eta;
  // K^T = Xi^{-1} C P
  const Matrix gain_t = llt.solve(CP);

  GaussianComponent out;
  out.model = comp.model;
  out.parent = comp.parent;
  out.mean = comp.mean + gain_t.transpose() * innovation;
  out.cov = symmetrize(comp.cov - gain_t.transpose() * CP);
  out.log_weight = comp.log_weight + log_gaussian_residual(llt, innovation);
  return out;
}

GaussianComponent kalman_predict(const GaussianComponent& comp, const DecorrelatedModel& model,
                                 const Vector& ubar, double transition) {
  GaussianComponent out;
  out.model = comp.model;
  out.parent = comp.parent;
  out.mean = model.A * comp.mean + model.B * ubar;
  out.cov = symmetrize(model.A * comp.cov * model.A.transpose() + model.Q);
  out.log_weight = comp.log_weight + log_or_neg_inf(transition);
  return out;
}

GaussianComponent kalman_smooth(const GaussianComponent& comp, const DecorrelatedModel& model,
                                const Vector& ubar, const Vector& x_next, double transition) {
  if (!(transition > 0.0) || comp.log_weight == -std::numeric_limits<double>::infinity()) {
    GaussianComponent out = comp;
    out.log_weight = -std::numeric_limits<double>::infinity();
    return out;
  }
  const Vector eta = model.A * comp.mean + model.B * ubar;
  const Matrix AP = model.A * comp.cov;
  const Matrix xi = symmetrize(AP * model.A.transpose() + model.Q);
  const auto llt = cholesky_with_jitter(xi, "backward prediction covariance");
  const Vector residual = x_next - eta;
  const Matrix gain_t = llt.solve(AP);  // K^T

  GaussianComponent out;
  out.model = comp.model;
  out.parent = comp.parent;
  out.mean = comp.mean + gain_t.transpose() * residual;
  out.cov = symmetrize(comp.cov - gain_t.transpose() * AP);
  out.log_weight =
      comp.log_weight + log_or_neg_inf(transition) + log_gaussian_residual(llt, residual);
  return out;
}

}  // namespace jmls
