#include "jmls/cli.hpp"

#include "jmls/analysis.hpp"
#include "jmls/io.hpp"

#include <CLI11.hpp>
#include <Eigen/Core>

#include <chrono>
#include <fstream>
#include <iostream>

#ifndef JMLS_VERSION
#define JMLS_VERSION "0.0.0"
#endif

namespace jmls::cli {

namespace fs = std::filesystem;
using io::InputError;
using io::Json;

namespace {

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

fs::path require_file(const fs::path& p) {
  if (!fs::is_regular_file(p)) throw InputError("no such file: " + p.string());
  return p;
}

void ensure_dir(const fs::path& p) {
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw std::runtime_error("cannot create " + p.string() + ": " + ec.message());
}

// Prior used when the config names none: the uninformative Example 1 setting,
// with nu raised to the smallest valid value for larger blocks.
HyperParams default_prior(Dimensions dims) {
  const double n = static_cast<double>(dims.n_x + dims.n_y);
  return HyperParams::isotropic(dims, 13.0, 1e-10, std::max(2.0, n), 1.0);
}

std::string csv_row(std::initializer_list<std::string> cells) {
  std::string out;
  for (const auto& c : cells) {
    if (!out.empty()) out += ",";
    out += c;
  }
  return out + "\n";
}

int report(const std::exception& e, int code) {
  std::cerr << "jmls: " << e.what() << "\n";
  return code;
}

}  // namespace

RunConfig load_run_config(const fs::path& path) {
  const Json j = io::read_json_file(require_file(path));
  const fs::path base = path.parent_path();
  RunConfig c;
  try {
    c.data = require_file(resolve(base, j.at("data").get<std::string>()));
    if (j.contains("prior")) c.prior = require_file(resolve(base, j.at("prior").get<std::string>()));
    if (j.contains("init_params")) {
      c.init_params = require_file(resolve(base, j.at("init_params").get<std::string>()));
    }
    if (j.contains("state_prior")) {
      c.state_prior = require_file(resolve(base, j.at("state_prior").get<std::string>()));
    }
    c.output = resolve(base, j.at("output").get<std::string>());
    c.n_x = j.at("n_x").get<Index>();
    c.m = j.at("m").get<Index>();
    c.iterations = j.value("iterations", c.iterations);
    if (j.contains("burn_in")) c.burn_in = j.at("burn_in").get<std::size_t>();
    c.thin = j.value("thin", c.thin);
    c.max_components = j.value("max_components", c.max_components);
    c.seed = j.value("seed", c.seed);
    c.store_trajectories = j.value("store_trajectories", c.store_trajectories);
  } catch (const Json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
  if (c.n_x < 1) throw InputError(path.string() + ": n_x must be at least 1");
  if (c.m < 1) throw InputError(path.string() + ": m must be at least 1");
  return c;
}

int simulate(const SimulateOptions& options) {
  try {
    if (options.steps <= 0) throw InputError("--n must be positive");
    const JmlsParams params = io::read_params_file(require_file(options.params));
    const Dimensions dims = params.dims();
    const auto n = static_cast<std::size_t>(options.steps);

    Rng input_rng = Rng::stream(options.seed, 0, 0);
    std::vector<Vector> inputs(n, Vector(dims.n_u));
    for (auto& u : inputs) {
      for (Index i = 0; i < dims.n_u; ++i) u(i) = input_rng.normal();
    }
    Rng state_rng = Rng::stream(options.seed, 1, 0);
    const int z1 = static_cast<int>(std::min<double>(
        std::floor(state_rng.uniform() * static_cast<double>(dims.m)), static_cast<double>(dims.m - 1)));
    const SimulationResult sim = jmls::simulate(params, inputs, Vector::Zero(dims.n_x), z1, state_rng);

    ensure_dir(options.out);
    io::write_data_csv(options.out / "data.csv", Dataset{inputs, sim.y});
    io::write_trajectory_csv(options.out / "trajectory.csv", sim.x, sim.z);
    return kSuccess;
  } catch (const InputError& e) {
    return report(e, kUsageError);
  } catch (const std::invalid_argument& e) {
    return report(e, kUsageError);
  } catch (const std::exception& e) {
    return report(e, kRuntimeFailure);
  }
}

int identify(const IdentifyOptions& options) {
  RunConfig rc;
  GibbsConfig config;
  Dataset data;
  Dimensions dims;
  try {
    rc = load_run_config(options.config);
    if (options.seed) rc.seed = *options.seed;
    if (options.out) rc.output = *options.out;
    data = io::read_data_csv(rc.data);
    dims = Dimensions{rc.n_x, data.n_u(), data.n_y(), rc.m};

    config.iterations = rc.iterations;
    config.burn_in = rc.burn_in.value_or(rc.iterations / 10);
    config.thin = rc.thin;
    config.max_components = rc.max_components;
    config.seed = rc.seed;
    config.store_trajectories = rc.store_trajectories;
    config.prior = rc.prior ? io::hyper_from_json(io::read_json_file(*rc.prior), dims) : default_prior(dims);
    config.state_prior = rc.state_prior
                             ? io::hybrid_prior_from_json(io::read_json_file(*rc.state_prior), dims)
                             : HybridPrior::diffuse(dims.m, dims.n_x);
    if (rc.init_params) {
      config.init_theta = io::read_params_file(*rc.init_params);
      if (config.init_theta->dims() != dims) throw InputError("init_params: dimensions do not match the data");
    }
    config.validate(dims);
  } catch (const InputError& e) {
    return report(e, kUsageError);
  } catch (const std::invalid_argument& e) {
    return report(e, kUsageError);
  } catch (const std::exception& e) {
    return report(e, kRuntimeFailure);
  }

  try {
    ensure_dir(rc.output);
    std::ofstream chain_out(rc.output / "chain.jsonl", std::ios::binary | std::ios::trunc);
    if (!chain_out) throw std::runtime_error("cannot write " + (rc.output / "chain.jsonl").string());
    std::string loglik = "iter,log_likelihood\n";
    std::size_t records = 0;

    GibbsObserver observer;
    observer.on_sample = [&](std::size_t iter, const JmlsParams& theta, bool stored) {
      if (!stored) return;
      chain_out << io::chain_record(iter, theta) << '\n';
      chain_out.flush();
      ++records;
    };
    observer.on_log_likelihood = [&](std::size_t iter, double ll) {
      loglik += std::to_string(iter) + "," + io::format_double(ll) + "\n";
    };

    Json meta;
    meta["version"] = JMLS_VERSION;
    meta["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                    std::to_string(EIGEN_MINOR_VERSION);
    meta["seed"] = rc.seed;
    meta["dimensions"] = {{"n_x", dims.n_x}, {"n_u", dims.n_u}, {"n_y", dims.n_y}, {"m", dims.m}};
    meta["iterations"] = config.iterations;
    meta["burn_in"] = config.burn_in;
    meta["thin"] = config.thin;
    meta["max_components"] = config.max_components;
    meta["data"] = rc.data.string();
    meta["steps"] = data.size();
    meta["resumable"] = false;

    const auto start = std::chrono::steady_clock::now();
    int code = kSuccess;
    try {
      const Chain chain = run_particle_gibbs(config, data, dims, observer);
      meta["status"] = "ok";
      meta["degenerate_reductions"] = chain.degenerate_reductions;
      if (rc.store_trajectories) {
        io::write_trajectory_csv(rc.output / "trajectory.csv", chain.last_trajectory.x,
                                 chain.last_trajectory.z);
      }
    } catch (const GibbsFailure& e) {
      meta["status"] = "failed";
      meta["error"] = {{"iteration", e.iteration()}, {"message", e.what()}};
      std::cerr << "jmls: " << e.what() << "\n";
      code = kRuntimeFailure;
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    meta["records"] = records;
    meta["timings"] = {{"total_seconds", seconds},
                       {"seconds_per_iteration", seconds / static_cast<double>(config.iterations)}};
    chain_out.close();
    io::write_file_atomic(rc.output / "loglik.csv", loglik);
    io::write_file_atomic(rc.output / "run_meta.json", meta.dump(2) + "\n");
    return code;
  } catch (const std::exception& e) {
    return report(e, kRuntimeFailure);
  }
}

int summarize(const SummarizeCliOptions& options) {
  try {
    const io::ChainFile file = io::read_chain_file(require_file(options.chain));
    if (file.lines == 0) throw InputError(options.chain.string() + ": empty chain");
    if (file.malformed > 0) {
      std::cerr << "jmls: skipped " << file.malformed << " malformed line(s) of " << file.lines << "\n";
    }
    if (static_cast<double>(file.malformed) > 0.01 * static_cast<double>(file.lines)) {
      throw std::runtime_error(options.chain.string() + ": more than 1% of lines are malformed");
    }
    std::vector<JmlsParams> samples;
    samples.reserve(file.records.size());
    for (const auto& r : file.records) samples.push_back(r.params);

    SummarizeOptions so;
    so.relabel = options.relabel;
    so.bins = options.bins;
    if (options.truth) {
      so.truth = io::read_params_file(require_file(*options.truth));
      if (so.truth->dims() != samples.front().dims()) {
        throw InputError("truth: dimensions do not match the chain");
      }
    }
    const PosteriorSummary summary = jmls::summarize(samples, so);

    ensure_dir(options.out / "histograms");
    auto write_histogram = [&](const ScalarSummary& s) {
      std::string out = "bin_left,bin_right,density\n";
      for (std::size_t b = 0; b < s.histogram.density.size(); ++b) {
        out += csv_row({io::format_double(s.histogram.edges[b]), io::format_double(s.histogram.edges[b + 1]),
                        io::format_double(s.histogram.density[b])});
      }
      io::write_file_atomic(options.out / "histograms" / (s.name + ".csv"), out);
    };

    std::string marginals = "name,mean,sd,median,lo95,hi95,lo99,hi99\n";
    for (const auto& s : summary.transition) {
      write_histogram(s);
      marginals += csv_row({s.name, io::format_double(s.mean), io::format_double(s.sd),
                            io::format_double(s.median), io::format_double(s.lo95), io::format_double(s.hi95),
                            io::format_double(s.lo99), io::format_double(s.hi99)});
    }
    for (const auto& s : summary.scalars) write_histogram(s);
    io::write_file_atomic(options.out / "transition_marginals.csv", marginals);

    std::string bode = "model,channel,freq,mean_mag,lo3sd,hi3sd\n";
    for (const auto& env : summary.bode) {
      for (std::size_t p = 0; p < env.frequencies.size(); ++p) {
        bode += csv_row({std::to_string(env.model + 1), std::to_string(env.channel + 1),
                         io::format_double(env.frequencies[p]), io::format_double(env.mean[p]),
                         io::format_double(env.lo3sd[p]), io::format_double(env.hi3sd[p])});
      }
    }
    io::write_file_atomic(options.out / "bode_envelope.csv", bode);

    if (so.truth) {
      Json coverage = Json::object();
      auto mark = [&](const ScalarSummary& s, double truth) {
        coverage[s.name] = {{"truth", truth},
                            {"lo95", s.lo95},
                            {"hi95", s.hi95},
                            {"lo99", s.lo99},
                            {"hi99", s.hi99},
                            {"covered95", s.lo95 <= truth && truth <= s.hi95},
                            {"covered99", s.lo99 <= truth && truth <= s.hi99}};
      };
      const Index m = so.truth->num_models();
      for (Index j = 0; j < m; ++j) {
        for (Index i = 0; i < m; ++i) {
          mark(summary.transition[static_cast<std::size_t>(j * m + i)], so.truth->T(i, j));
        }
      }
      for (const auto& s : summary.scalars) {
        const auto z = static_cast<std::size_t>(std::stoi(s.name.substr(1)) - 1);
        const auto& tm = so.truth->models[z];
        const double truth = s.name[0] == 'A' ? tm.A(0, 0) : s.name[0] == 'D' ? tm.D(0, 0) : tm.R(0, 0);
        mark(s, truth);
      }
      io::write_file_atomic(options.out / "coverage.json", coverage.dump(2) + "\n");
    }
    return kSuccess;
  } catch (const InputError& e) {
    return report(e, kUsageError);
  } catch (const std::invalid_argument& e) {
    return report(e, kUsageError);
  } catch (const std::exception& e) {
    return report(e, kRuntimeFailure);
  }
}

int run(int argc, char** argv) {
  CLI::App app{"Bayesian identification of jump Markov linear systems"};
  app.set_version_flag("--version", JMLS_VERSION);
  app.require_subcommand(1);

  SimulateOptions sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Simulate a dataset from a parameter file");
  sim_cmd->add_option("--params", sim.params, "Parameter file (JSON)")->required();
  sim_cmd->add_option("--n", sim.steps, "Number of time steps")->required();
  sim_cmd->add_option("--seed", sim.seed, "Random seed");
  sim_cmd->add_option("--out", sim.out, "Output directory")->required();

  IdentifyOptions id;
  auto* id_cmd = app.add_subcommand("identify", "Run the particle-Gibbs sampler");
  id_cmd->add_option("--config", id.config, "Run configuration (JSON)")->required();
  id_cmd->add_option("--seed", id.seed, "Override the configured seed");
  id_cmd->add_option("--out", id.out, "Override the configured output directory");

  SummarizeCliOptions sum;
  bool no_relabel = false;
  auto* sum_cmd = app.add_subcommand("summarize", "Summarize a chain file");
  sum_cmd->add_option("--chain", sum.chain, "chain.jsonl")->required();
  sum_cmd->add_option("--truth", sum.truth, "True parameter file, enables coverage.json");
  sum_cmd->add_option("--out", sum.out, "Output directory")->required();
  sum_cmd->add_option("--bins", sum.bins, "Histogram bins (0 picks Freedman-Diaconis)");
  sum_cmd->add_flag("--no-relabel", no_relabel, "Keep the sampled mode labels");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kSuccess : kUsageError;
  }

  if (sim_cmd->parsed()) return simulate(sim);
  if (id_cmd->parsed()) return identify(id);
  sum.relabel = !no_relabel;
  return summarize(sum);
}

}  // namespace jmls::cli
