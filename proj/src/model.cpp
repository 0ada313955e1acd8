#include "jmls/model.hpp"

#include "jmls/distributions.hpp"
#include "jmls/linalg.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace jmls {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

void check_shape(std::vector<std::string>& out, const Matrix& m, Index rows, Index cols,
                 const std::string& name) {
  if (m.rows() != rows || m.cols() != cols) {
    out.push_back(name + " is " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                  ", expected " + std::to_string(rows) + "x" + std::to_string(cols));
  }
}

}  // namespace

Matrix ModelMatrices::gamma() const {
  const Index nx = n_x(), nu = n_u(), ny = n_y();
  Matrix g(ny + nx, nx + nu);
  g.topLeftCorner(ny, nx) = C;
  g.topRightCorner(ny, nu) = D;
  g.bottomLeftCorner(nx, nx) = A;
  g.bottomRightCorner(nx, nu) = B;
  return g;
}

Matrix ModelMatrices::pi() const {
  const Index nx = n_x(), ny = n_y();
  Matrix p(ny + nx, ny + nx);
  p.topLeftCorner(ny, ny) = R;
  p.topRightCorner(ny, nx) = S.transpose();
  p.bottomLeftCorner(nx, ny) = S;
  p.bottomRightCorner(nx, nx) = Q;
  return p;
}

ModelMatrices ModelMatrices::from_blocks(const Matrix& gamma, const Matrix& pi, Index n_x,
                                         Index n_u, Index n_y) {
  if (gamma.rows() != n_y + n_x || gamma.cols() != n_x + n_u || pi.rows() != n_y + n_x ||
      pi.cols() != n_y + n_x) {
    throw std::invalid_argument("ModelMatrices::from_blocks: block sizes do not match dimensions");
  }
  ModelMatrices m;
  m.C = gamma.topLeftCorner(n_y, n_x);
  m.D = gamma.topRightCorner(n_y, n_u);
  m.A = gamma.bottomLeftCorner(n_x, n_x);
  m.B = gamma.bottomRightCorner(n_x, n_u);
  const Matrix p = symmetrize(pi);
  m.R = p.topLeftCorner(n_y, n_y);
  m.S = p.bottomLeftCorner(n_x, n_y);
  m.Q = p.bottomRightCorner(n_x, n_x);
  return m;
}

ModelMatrices ModelMatrices::symmetrized() const {
  ModelMatrices m = *this;
  m.Q = symmetrize(Q);
  m.R = symmetrize(R);
  return m;
}

Dimensions JmlsParams::dims() const {
  if (models.empty()) return {0, 0, 0, 0};
  const auto& first = models.front();
  return {first.n_x(), first.n_u(), first.n_y(), num_models()};
}

std::vector<std::string> validate_params(const JmlsParams& params) {
  std::vector<std::string> out;
  const Index m = params.num_models();
  if (m < 1) {
    out.push_back("no models");
    return out;
  }
  if (params.T.rows() != m || params.T.cols() != m) {
    out.push_back("T is " + std::to_string(params.T.rows()) + "x" +
                  std::to_string(params.T.cols()) + ", expected " + std::to_string(m) + "x" +
                  std::to_string(m));
  } else {
    for (Index j = 0; j < m; ++j) {
      const double sum = params.T.col(j).sum();
      if (!std::isfinite(sum) || std::abs(sum - 1.0) > 1e-9) {
        out.push_back("column " + std::to_string(j + 1) + " sums to " + fmt(sum));
      }
      for (Index i = 0; i < m; ++i) {
        if (!(params.T(i, j) >= 0.0)) {
          out.push_back("T(" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                        ") is negative");
        }
      }
    }
  }

  const Dimensions d = params.dims();
  for (Index i = 0; i < m; ++i) {
    const auto& mod = params.models[static_cast<std::size_t>(i)];
    const std::string tag = "model " + std::to_string(i + 1) + ": ";
    const std::size_t before = out.size();
    check_shape(out, mod.A, d.n_x, d.n_x, tag + "A");
    check_shape(out, mod.B, d.n_x, d.n_u, tag + "B");
    check_shape(out, mod.C, d.n_y, d.n_x, tag + "C");
    check_shape(out, mod.D, d.n_y, d.n_u, tag + "D");
    check_shape(out, mod.Q, d.n_x, d.n_x, tag + "Q");
    check_shape(out, mod.R, d.n_y, d.n_y, tag + "R");
    check_shape(out, mod.S, d.n_x, d.n_y, tag + "S");
    if (out.size() != before) continue;

    const Matrix pi = mod.pi();
    if (!mod.gamma().allFinite() || !pi.allFinite()) {
      out.push_back(tag + "non-finite entries");
      continue;
    }
    const double scale = std::max(pi.norm(), std::numeric_limits<double>::min());
    if ((mod.Q - mod.Q.transpose()).norm() > 1e-9 * scale ||
        (mod.R - mod.R.transpose()).norm() > 1e-9 * scale) {
      out.push_back(tag + "noise covariance is not symmetric");
    }
    if (!is_psd(pi)) out.push_back(tag + "Pi is not positive semi-definite");
    if (!is_pd(mod.R)) out.push_back(tag + "R is not positive definite");
  }
  return out;
}

void require_valid(const JmlsParams& params) {
  const auto violations = validate_params(params);
  if (violations.empty()) return;
  std::ostringstream os;
  os << "invalid parameters:";
  for (const auto& v : violations) os << "\n  " << v;
  throw std::invalid_argument(os.str());
}

std::vector<DecorrelatedModel> decorrelate(const JmlsParams& params) {
  std::vector<DecorrelatedModel> out;
  out.reserve(params.models.size());
  for (std::size_t i = 0; i < params.models.size(); ++i) {
    const auto& m = params.models[i];
    Eigen::LLT<Matrix> llt(symmetrize(m.R));
    if (llt.info() != Eigen::Success) {
      throw std::invalid_argument("decorrelate: R of model " + std::to_string(i + 1) +
                                  " is singular");
    }
    // G = S R^{-1}
    const Matrix G = llt.solve(m.S.transpose()).transpose();
    const Index nu = m.n_u(), ny = m.n_y(), nx = m.n_x();
    DecorrelatedModel d;
    d.A = m.A - G * m.C;
    d.B.resize(nx, nu + ny);
    d.B.leftCols(nu) = m.B - G * m.D;
    d.B.rightCols(ny) = G;
    d.C = m.C;
    d.D = Matrix::Zero(ny, nu + ny);
    d.D.leftCols(nu) = m.D;
    d.Q = symmetrize(m.Q - G * m.S.transpose());
    d.R = m.R;
    out.push_back(std::move(d));
  }
  return out;
}

Vector Dataset::augmented_input(std::size_t k) const {
  const Vector& yk = y.at(k);
  const Index nu = n_u();
  Vector out(nu + yk.size());
  if (nu > 0) out.head(nu) = u.at(k);
  out.tail(yk.size()) = yk;
  return out;
}

void Dataset::validate() const {
  if (y.empty()) throw std::invalid_argument("dataset is empty");
  if (u.size() != y.size()) {
    throw std::invalid_argument("dataset has " + std::to_string(u.size()) + " inputs but " +
                                std::to_string(y.size()) + " outputs");
  }
  const Index nu = n_u(), ny = n_y();
  for (std::size_t k = 0; k < y.size(); ++k) {
    if (u[k].size() != nu || y[k].size() != ny) {
      throw std::invalid_argument("dataset row " + std::to_string(k + 1) +
                                  " has inconsistent dimensions");
    }
  }
}

HybridPrior HybridPrior::diffuse(Index m, Index n_x, double variance) {
  HybridPrior p;
  for (Index z = 0; z < m; ++z) {
    p.entries.push_back({static_cast<int>(z), 1.0 / static_cast<double>(m), Vector::Zero(n_x),
                         variance * Matrix::Identity(n_x, n_x)});
  }
  return p;
}

void HybridPrior::validate(Index m, Index n_x) const {
  if (entries.empty()) throw std::invalid_argument("state prior has no components");
  double total = 0.0;
  for (const auto& e : entries) {
    if (e.model < 0 || e.model >= m) throw std::invalid_argument("state prior: bad model index");
    if (e.mean.size() != n_x || e.cov.rows() != n_x || e.cov.cols() != n_x) {
      throw std::invalid_argument("state prior: component dimension mismatch");
    }
    if (!(e.weight >= 0.0)) throw std::invalid_argument("state prior: negative weight");
    if (!is_pd(e.cov)) throw std::invalid_argument("state prior: covariance not PD");
    total += e.weight;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("state prior: weights sum to " + fmt(total));
  }
}

SimulationResult simulate(const JmlsParams& params, const std::vector<Vector>& inputs,
                          const Vector& x1, int z1, Rng& rng) {
  require_valid(params);
  const Dimensions d = params.dims();
  if (x1.size() != d.n_x) throw std::invalid_argument("simulate: x1 has wrong dimension");
  if (z1 < 0 || z1 >= d.m) throw std::invalid_argument("simulate: z1 out of range");
  for (const auto& u : inputs) {
    if (u.size() != d.n_u) throw std::invalid_argument("simulate: input has wrong dimension");
  }

  std::vector<Matrix> gammas, factors;
  for (const auto& m : params.models) {
    gammas.push_back(m.gamma());
    factors.push_back(psd_factor(m.pi()));
  }

  const std::size_t N = inputs.size();
  SimulationResult out;
  out.y.reserve(N);
  out.x.reserve(N + 1);
  out.z.reserve(N + 1);
  out.x.push_back(x1);
  out.z.push_back(z1);
  Vector regressor(d.n_x + d.n_u), noise(d.n_y + d.n_x);
  std::vector<double> column(static_cast<std::size_t>(d.m));
  for (std::size_t k = 0; k < N; ++k) {
    const auto z = static_cast<std::size_t>(out.z.back());
    regressor.head(d.n_x) = out.x.back();
    regressor.tail(d.n_u) = inputs[k];
    for (Index i = 0; i < noise.size(); ++i) noise(i) = rng.normal();
    const Vector stacked = gammas[z] * regressor + factors[z] * noise;
    out.y.push_back(stacked.head(d.n_y));
    out.x.push_back(stacked.tail(d.n_x));
    for (Index i = 0; i < d.m; ++i) column[static_cast<std::size_t>(i)] = params.T(i, z);
    out.z.push_back(static_cast<int>(sample_categorical(column, rng)));
  }
  return out;
}

Vector stationary_distribution(const Matrix& T) {
  const Index m = T.rows();
  Matrix system(m + 1, m);
  system.topRows(m) = T - Matrix::Identity(m, m);
  system.row(m).setOnes();
  Vector rhs = Vector::Zero(m + 1);
  rhs(m) = 1.0;
  return system.colPivHouseholderQr().solve(rhs);
}

}  // namespace jmls
