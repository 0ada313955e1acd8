#pragma once

#include "jmls/backward_sampler.hpp"
#include "jmls/conjugate.hpp"
#include "jmls/gibbs.hpp"
#include "jmls/model.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

namespace jmls::io {

using Json = nlohmann::json;

/// Bad input files or arguments (CLI exit code 2).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// "%.17g"; round-trips every finite double.
std::string format_double(double value);

/// Row-major flattening used in every file format.
Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j, Index rows, Index cols, const std::string& what);

/// {"A","B","C","D","Q","R","S"} row-major arrays per model and T column-major.
Json params_to_json(const JmlsParams& params);
/// Dimensions are inferred from array lengths when the file does not state them.
JmlsParams params_from_json(const Json& j);

JmlsParams read_params_file(const std::filesystem::path& path);
void write_params_file(const std::filesystem::path& path, const JmlsParams& params);

/// Header `k,u_1..u_{n_u},y_1..y_{n_y}`, k from 1.
void write_data_csv(const std::filesystem::path& path, const Dataset& data);
Dataset read_data_csv(const std::filesystem::path& path);

/// Header `k,z,x_1..x_{n_x}`, k and z from 1.
void write_trajectory_csv(const std::filesystem::path& path, const std::vector<Vector>& x,
                          const std::vector<int>& z);

/// One chain.jsonl line (no trailing newline).
std::string chain_record(std::size_t iteration, const JmlsParams& params);
struct ChainRecord {
  std::size_t iteration = 0;
  JmlsParams params;
};
/// std::nullopt for malformed lines.
std::optional<ChainRecord> parse_chain_record(const std::string& line);

struct ChainFile {
  std::vector<ChainRecord> records;
  std::size_t malformed = 0;
  std::size_t lines = 0;
};
ChainFile read_chain_file(const std::filesystem::path& path);

/// {"models":[{"M","V","Lambda","nu"}], "alpha"} or the shorthand
/// {"isotropic":{"V":13,"Lambda":1e-10,"nu":2,"alpha":1}}.
HyperParams hyper_from_json(const Json& j, Dimensions dims);

/// {"components":[{"model":1,"weight":..,"mean":[..],"cov":[..]}]}; model is 1-based.
HybridPrior hybrid_prior_from_json(const Json& j, Dimensions dims);

/// Writes through a temporary file in the same directory and renames.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

Json read_json_file(const std::filesystem::path& path);

}  // namespace jmls::io
