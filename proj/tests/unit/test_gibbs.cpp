#include "jmls/diagnostics.hpp"
#include "jmls/gibbs.hpp"

#include "support/oracles.hpp"
#include "support/systems.hpp"

#include <doctest.h>

#include <cmath>

using namespace jmls;

namespace {

Dataset example_data(std::size_t n, std::uint64_t seed) {
  const auto p = systems::example1();
  Rng rng(seed);
  std::vector<Vector> u(n, Vector(1));
  for (auto& v : u) v(0) = rng.normal();
  return {u, simulate(p, u, Vector::Zero(1), 0, rng).y};
}

GibbsConfig small_config(std::size_t iterations, std::size_t burn_in, std::size_t thin) {
  GibbsConfig c;
  c.iterations = iterations;
  c.burn_in = burn_in;
  c.thin = thin;
  c.seed = 77;
  c.prior = HyperParams::isotropic({1, 1, 1, 2}, 13.0, 1e-10, 2.0, 1.0);
  c.state_prior = HybridPrior::diffuse(2, 1);
  c.init_theta = systems::example1();
  return c;
}

bool same_params(const JmlsParams& a, const JmlsParams& b) {
  if (a.T != b.T) return false;
  for (std::size_t i = 0; i < a.models.size(); ++i) {
    if (a.models[i].gamma() != b.models[i].gamma() || a.models[i].pi() != b.models[i].pi()) return false;
  }
  return true;
}

}  // namespace

TEST_SUITE("gibbs") {

TEST_CASE("single sweep") {
  const auto c = small_config(1, 0, 1);
  const auto chain = run_particle_gibbs(c, example_data(30, 1), {1, 1, 1, 2});
  REQUIRE(chain.samples.size() == 1);
  CHECK(chain.sample_iterations[0] == 1);
  CHECK(chain.log_likelihood.size() == 1);
  CHECK(validate_params(chain.samples[0]).empty());
}

TEST_CASE("storage schedule") {
  const auto data = example_data(20, 2);
  auto chain = run_particle_gibbs(small_config(10, 0, 1), data, {1, 1, 1, 2});
  CHECK(chain.samples.size() == 10);
  chain = run_particle_gibbs(small_config(10, 2, 3), data, {1, 1, 1, 2});
  CHECK(chain.samples.size() == Chain::expected_length(10, 2, 3));
  CHECK(chain.sample_iterations == std::vector<std::size_t>{3, 6, 9});
  CHECK(chain.log_likelihood.size() == 10);
  CHECK(chain.trajectories.empty());
  CHECK(chain.last_trajectory.size() == 21);
}

TEST_CASE("identical seeds give identical chains") {
  const auto data = example_data(25, 3);
  auto c = small_config(15, 5, 1);
  c.init_theta.reset();
  const auto a = run_particle_gibbs(c, data, {1, 1, 1, 2});
  const auto b = run_particle_gibbs(c, data, {1, 1, 1, 2});
  REQUIRE(a.samples.size() == b.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i) CHECK(same_params(a.samples[i], b.samples[i]));
  CHECK(a.log_likelihood == b.log_likelihood);
}

TEST_CASE("each sweep conditions on the previous sweep's sequence") {
  const auto data = example_data(25, 4);
  auto c = small_config(3, 0, 1);
  c.store_trajectories = true;
  const Dimensions dims{1, 1, 1, 2};
  const auto chain = run_particle_gibbs(c, data, dims);

  // Replay the sweeps by hand from the same streams.
  JmlsParams theta = *c.init_theta;
  std::vector<int> z(26);
  Rng init = gibbs_stream(c.seed, 0, StreamPurpose::initial_sequence);
  for (auto& v : z) v = static_cast<int>(init() % 2);
  for (std::size_t l = 1; l <= 3; ++l) {
    Rng fr = gibbs_stream(c.seed, l, StreamPurpose::filter);
    const auto h = forward_filter(theta, data, c.state_prior, c.max_components, z, fr);
    Rng tr = gibbs_stream(c.seed, l, StreamPurpose::trajectory);
    const auto traj = sample_trajectory(h, theta, tr);
    CHECK(traj.z == chain.trajectories[l - 1].z);
    Rng pr = gibbs_stream(c.seed, l, StreamPurpose::parameters);
    theta = sample_parameters(posterior_hyperparams(c.prior, sufficient_stats(traj, data, dims)), dims, pr);
    CHECK(same_params(theta, chain.samples[l - 1]));
    z = traj.z;
  }
}

TEST_CASE("observer sees every iteration") {
  std::size_t calls = 0, stored = 0, ll = 0;
  GibbsObserver obs;
  obs.on_sample = [&](std::size_t, const JmlsParams&, bool s) {
    ++calls;
    stored += s;
  };
  obs.on_log_likelihood = [&](std::size_t, double) { ++ll; };
  run_particle_gibbs(small_config(6, 2, 2), example_data(15, 5), {1, 1, 1, 2}, obs);
  CHECK(calls == 6);
  CHECK(ll == 6);
  CHECK(stored == 2);
}

TEST_CASE("failures carry the iteration and the partial chain") {
  auto data = example_data(15, 6);
  data.y[4](0) = 1e200;
  try {
    run_particle_gibbs(small_config(5, 0, 1), data, {1, 1, 1, 2});
    FAIL("expected failure");
  } catch (const GibbsFailure& e) {
    CHECK(e.iteration() == 1);
    CHECK(e.partial_chain().samples.empty());
    CHECK(std::string(e.what()).find("filter degeneracy at step 5") != std::string::npos);
  }
}

TEST_CASE("configuration errors") {
  const auto data = example_data(10, 7);
  CHECK_THROWS_AS(run_particle_gibbs(small_config(5, 5, 1), data, {1, 1, 1, 2}), std::invalid_argument);
  CHECK_THROWS_AS(run_particle_gibbs(small_config(5, 0, 0), data, {1, 1, 1, 2}), std::invalid_argument);
  auto c = small_config(5, 0, 1);
  c.max_components = 1;
  CHECK_THROWS_AS(run_particle_gibbs(c, data, {1, 1, 1, 2}), std::invalid_argument);
  CHECK_THROWS_AS(run_particle_gibbs(small_config(5, 0, 1), data, {1, 1, 1, 3}), std::invalid_argument);
}

TEST_CASE("diagnostics of synthetic chains") {
  const std::vector<double> constant(500, 0.3);
  const auto c = trace_diagnostics(constant, "c");
  CHECK(c.zero_variance);
  CHECK(c.ess == 500.0);
  CHECK(c.variance == 0.0);

  Rng rng(8);
  const std::size_t L = 20000;
  std::vector<double> iid(L);
  for (auto& v : iid) v = rng.normal();
  const auto w = trace_diagnostics(iid);
  CHECK(std::abs(w.autocorrelation[0]) < 3.0 / std::sqrt(static_cast<double>(L)));
  CHECK_FALSE(w.zero_variance);

  std::vector<double> ar(L);
  double x = 0.0;
  for (auto& v : ar) v = x = 0.9 * x + rng.normal();
  const auto a = trace_diagnostics(ar);
  const double ratio = a.ess / static_cast<double>(L);
  CHECK(std::abs(ratio - 0.1 / 1.9) < 0.3 * (0.1 / 1.9));
  CHECK(std::abs(a.autocorrelation[0] - 0.9) < 0.02);
}

TEST_CASE("chain diagnostics cover every scalar") {
  const auto chain = run_particle_gibbs(small_config(20, 0, 1), example_data(20, 9), {1, 1, 1, 2});
  const auto d = chain_diagnostics(chain);
  // 4 entries of T plus 7 scalar matrices per mode.
  CHECK(d.size() == 4 + 2 * 7);
  CHECK(d.front().name == "T[1,1]");
}

}  // TEST_SUITE

TEST_SUITE("gibbs_reference") {

TEST_CASE("single mode chain agrees with a Kalman-based Gibbs sampler") {
  std::mt19937_64 g(10);
  JmlsParams truth;
  truth.models.push_back(systems::random_model(g, 1, 1, 1));
  truth.T = Matrix::Ones(1, 1);
  Rng rng(11);
  std::vector<Vector> u(100, Vector(1));
  for (auto& v : u) v(0) = rng.normal();
  const Dataset data{u, simulate(truth, u, Vector::Zero(1), 0, rng).y};

  const Dimensions dims{1, 1, 1, 1};
  GibbsConfig c;
  c.iterations = 20000;
  c.burn_in = 2000;
  c.seed = 12;
  c.max_components = 2;
  c.prior = HyperParams::isotropic(dims, 10.0, 0.01, 4.0, 1.0);
  c.state_prior = HybridPrior::diffuse(1, 1);
  c.init_theta = truth;
  const auto chain = run_particle_gibbs(c, data, dims);

  const oracle::LinearPrior lp{Matrix::Zero(2, 2), 10.0 * Matrix::Identity(2, 2), 0.01 * Matrix::Identity(2, 2), 4.0};
  const auto ref = oracle::linear_gibbs(data, truth.models[0], lp, Vector::Zero(1), 10.0 * Matrix::Identity(1, 1),
                                        c.iterations, 13);

  auto compare = [&](const char* name, auto extract) {
    std::vector<double> a, b;
    for (const auto& s : chain.samples) a.push_back(extract(s.models[0]));
    for (std::size_t i = c.burn_in; i < ref.size(); ++i) b.push_back(extract(ref[i]));
    const auto da = trace_diagnostics(a), db = trace_diagnostics(b);
    const double se = std::sqrt(da.variance / da.ess + db.variance / db.ess);
    INFO(name << ": " << da.mean << " vs " << db.mean << " (se " << se << ")");
    CHECK(std::abs(da.mean - db.mean) < 3.0 * se);
  };
  compare("A", [](const ModelMatrices& m) { return m.A(0, 0); });
  compare("D", [](const ModelMatrices& m) { return m.D(0, 0); });
  compare("R", [](const ModelMatrices& m) { return m.R(0, 0); });
  compare("CB", [](const ModelMatrices& m) { return m.C(0, 0) * m.B(0, 0); });
}

}  // TEST_SUITE
