#include "systems.hpp"

#include <Eigen/Eigenvalues>

namespace systems {

namespace {

Matrix scalar(double v) { return Matrix::Constant(1, 1, v); }

Matrix gaussian_matrix(std::mt19937_64& g, Index r, Index c, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  Matrix m(r, c);
  for (Index i = 0; i < r; ++i) {
    for (Index j = 0; j < c; ++j) m(i, j) = n(g);
  }
  return m;
}

}  // namespace

JmlsParams example1() {
  JmlsParams p;
  p.models.push_back({scalar(0.4766), scalar(-1.207), scalar(0.233), scalar(-0.8935), scalar(1e-3),
                      scalar(0.0202), scalar(0.0)});
  p.models.push_back({scalar(-0.1721), scalar(1.5330), scalar(-0.1922), scalar(1.7449), scalar(0.0340),
                      scalar(0.0439), scalar(0.0)});
  p.T.resize(2, 2);
  p.T << 0.7, 0.5, 0.3, 0.5;
  return p;
}

ModelMatrices realize_siso(const std::array<double, 4>& num, const std::array<double, 3>& den, double q,
                           double r) {
  ModelMatrices m;
  m.A = Matrix::Zero(3, 3);
  m.A.row(0) << -den[0], -den[1], -den[2];
  m.A(1, 0) = 1.0;
  m.A(2, 1) = 1.0;
  m.B = Matrix::Zero(3, 1);
  m.B(0, 0) = 1.0;
  m.C.resize(1, 3);
  for (int i = 0; i < 3; ++i) m.C(0, i) = num[static_cast<std::size_t>(i + 1)] - num[0] * den[static_cast<std::size_t>(i)];
  m.D = scalar(num[0]);
  m.Q = q * Matrix::Identity(3, 3);
  m.R = scalar(r);
  m.S = Matrix::Zero(3, 1);
  return m;
}

std::array<double, 4> example2_numerator(int i) {
  switch (i) {
    case 0: return {217.4, 212.9, -0.003827, 4.603e-20};
    case 1: return {0.4184, 0.008764, 0.1669, -0.01542};
    default: return {0.2728, -0.9506, 1.066, -0.3881};
  }
}

std::array<double, 3> example2_denominator(int i) {
  if (i == 0) return {-1.712, 0.9512, -1.481e-6};
  return {-2.374, 1.929, -0.5321};
}

JmlsParams example2() {
  JmlsParams p;
  for (int i = 0; i < 3; ++i) {
    p.models.push_back(realize_siso(example2_numerator(i), example2_denominator(i), 1e-4, 1e-2));
  }
  p.T.resize(3, 3);
  p.T << 0.5, 0.25, 0.25, 0.25, 0.5, 0.25, 0.25, 0.25, 0.5;
  return p;
}

Matrix random_spd(std::mt19937_64& g, Index n, double floor) {
  const Matrix a = gaussian_matrix(g, n, n);
  return a * a.transpose() / static_cast<double>(n) + floor * Matrix::Identity(n, n);
}

ModelMatrices random_model(std::mt19937_64& g, Index nx, Index nu, Index ny, bool cross) {
  ModelMatrices m;
  m.A = gaussian_matrix(g, nx, nx);
  const double radius = Eigen::EigenSolver<Matrix>(m.A).eigenvalues().cwiseAbs().maxCoeff();
  std::uniform_real_distribution<double> target(0.1, 0.9);
  m.A *= target(g) / std::max(radius, 1e-12);
  m.B = gaussian_matrix(g, nx, nu);
  m.C = gaussian_matrix(g, ny, nx);
  m.D = gaussian_matrix(g, ny, nu);
  const Matrix pi = random_spd(g, nx + ny, 0.05);
  m.R = pi.topLeftCorner(ny, ny);
  m.Q = pi.bottomRightCorner(nx, nx);
  m.S = cross ? Matrix(pi.bottomLeftCorner(nx, ny)) : Matrix::Zero(nx, ny);
  return m;
}

Matrix random_transition(std::mt19937_64& g, Index m) {
  std::uniform_real_distribution<double> u(0.2, 1.0);
  Matrix t(m, m);
  for (Index j = 0; j < m; ++j) {
    for (Index i = 0; i < m; ++i) t(i, j) = u(g);
    t.col(j) /= t.col(j).sum();
  }
  return t;
}

jmls::HyperParams isotropic_prior(jmls::Dimensions dims, double v, double lambda, double nu) {
  return jmls::HyperParams::isotropic(dims, v, lambda, nu, 1.0);
}

}  // namespace systems
