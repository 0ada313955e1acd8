#pragma once

#include "jmls/gibbs.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace jmls::cli {

enum ExitCode : int { kSuccess = 0, kRuntimeFailure = 1, kUsageError = 2 };

struct SimulateOptions {
  std::filesystem::path params;
  long long steps = 0;
  std::uint64_t seed = 1;
  std::filesystem::path out;
};

/// File-backed identification run. Relative paths resolve against the config
/// file's directory.
struct RunConfig {
  std::filesystem::path data;
  std::optional<std::filesystem::path> prior;
  std::optional<std::filesystem::path> init_params;
  std::optional<std::filesystem::path> state_prior;
  std::filesystem::path output;
  Index n_x = 0;
  Index m = 0;
  std::size_t iterations = 1000;
  std::optional<std::size_t> burn_in;  // default 10% of iterations
  std::size_t thin = 1;
  std::size_t max_components = 5;
  std::uint64_t seed = 1;
  bool store_trajectories = false;
};

RunConfig load_run_config(const std::filesystem::path& path);

struct IdentifyOptions {
  std::filesystem::path config;
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> out;
};

struct SummarizeCliOptions {
  std::filesystem::path chain;
  std::optional<std::filesystem::path> truth;
  std::filesystem::path out;
  std::size_t bins = 0;
  bool relabel = true;
};

int simulate(const SimulateOptions& options);
int identify(const IdentifyOptions& options);
int summarize(const SummarizeCliOptions& options);

/// Full command-line entry point (`simulate`, `identify`, `summarize`).
int run(int argc, char** argv);

}  // namespace jmls::cli
