#include "jmls/cli.hpp"
#include "jmls/io.hpp"

#include "support/systems.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace jmls;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("jmls_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary);
  out << s;
}

std::size_t count_lines(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) n += !line.empty();
  return n;
}

void check_identical(const JmlsParams& a, const JmlsParams& b) {
  REQUIRE(a.models.size() == b.models.size());
  CHECK(a.T == b.T);
  for (std::size_t i = 0; i < a.models.size(); ++i) {
    CHECK(a.models[i].gamma() == b.models[i].gamma());
    CHECK(a.models[i].pi() == b.models[i].pi());
  }
}

// Writes params.json and a config for a short Example 1 run.
fs::path example_run(const fs::path& dir, std::size_t iterations) {
  io::write_params_file(dir / "truth.json", systems::example1());
  REQUIRE(cli::simulate({dir / "truth.json", 60, 3, dir / "sim"}) == 0);
  io::Json cfg = {{"data", "sim/data.csv"}, {"output", "run"}, {"n_x", 1}, {"m", 2},
                  {"iterations", iterations}, {"burn_in", 0}, {"seed", 5}};
  spit(dir / "config.json", cfg.dump());
  return dir / "config.json";
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("doubles round trip through text") {
  std::mt19937_64 g(1);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double v = u(g) * std::pow(10.0, (i % 40) - 20);
    CHECK(std::stod(io::format_double(v)) == v);
  }
}

TEST_CASE("parameter files round trip exactly") {
  const auto dir = scratch("params");
  std::mt19937_64 g(2);
  JmlsParams p;
  p.models = {systems::random_model(g, 2, 1, 2, true), systems::random_model(g, 2, 1, 2, true)};
  p.T = systems::random_transition(g, 2);
  io::write_params_file(dir / "p.json", p);
  check_identical(io::read_params_file(dir / "p.json"), p);
  check_identical(io::read_params_file(dir / "p.json"), io::params_from_json(io::params_to_json(p)));
}

TEST_CASE("parameter file errors") {
  const auto dir = scratch("params_bad");
  CHECK_THROWS_AS(io::read_params_file(dir / "missing.json"), io::InputError);
  spit(dir / "bad.json", "{\"T\": [1], \"models\": [{\"A\": [0.5], \"B\": [1], \"C\": [1], \"D\": [0], "
                         "\"Q\": [-1], \"R\": [1]}]}");
  CHECK_THROWS_AS(io::read_params_file(dir / "bad.json"), io::InputError);
  spit(dir / "junk.json", "{not json");
  CHECK_THROWS_AS(io::read_params_file(dir / "junk.json"), io::InputError);
}

TEST_CASE("matrices accept flat and nested forms") {
  const Matrix flat = io::matrix_from_json(io::Json::parse("[1, 2, 3, 4]"), 2, 2, "X");
  const Matrix nested = io::matrix_from_json(io::Json::parse("[[1, 2], [3, 4]]"), 2, 2, "X");
  CHECK(flat == nested);
  CHECK(flat(0, 1) == 2);
  CHECK(io::matrix_from_json(io::Json(7.0), 1, 1, "X")(0, 0) == 7.0);
  CHECK_THROWS(io::matrix_from_json(io::Json::parse("[1, 2, 3]"), 2, 2, "X"));
}

TEST_CASE("data csv") {
  const auto dir = scratch("csv");
  Dataset d;
  d.u = {Vector::Constant(1, 0.1), Vector::Constant(1, -2.5)};
  d.y = {Vector::Constant(2, 1.0 / 3.0), Vector::Constant(2, 1e-300)};
  io::write_data_csv(dir / "d.csv", d);
  CHECK(slurp(dir / "d.csv").rfind("k,u_1,y_1,y_2\n", 0) == 0);
  const auto r = io::read_data_csv(dir / "d.csv");
  CHECK(r.u[1](0) == -2.5);
  CHECK(r.y[0](1) == 1.0 / 3.0);
  CHECK(r.y[1](0) == 1e-300);

  spit(dir / "bad.csv", "k,u_1,y_1\n1,0.5,x\n");
  try {
    io::read_data_csv(dir / "bad.csv");
    FAIL("expected an error");
  } catch (const io::InputError& e) {
    CHECK(std::string(e.what()).find("bad.csv:2") != std::string::npos);
  }
  spit(dir / "empty.csv", "k,u_1,y_1\n");
  CHECK_THROWS_AS(io::read_data_csv(dir / "empty.csv"), io::InputError);
}

TEST_CASE("chain records") {
  const auto p = systems::example1();
  const auto line = io::chain_record(12, p);
  CHECK(line.find('\n') == std::string::npos);
  const auto rec = io::parse_chain_record(line);
  REQUIRE(rec);
  CHECK(rec->iteration == 12);
  check_identical(rec->params, p);
  CHECK_FALSE(io::parse_chain_record("{\"iter\": 1}"));
  CHECK_FALSE(io::parse_chain_record(line.substr(0, line.size() / 2)));

  const auto dir = scratch("chain");
  spit(dir / "chain.jsonl", line + "\n\n" + "garbage\n" + io::chain_record(13, p) + "\n");
  const auto f = io::read_chain_file(dir / "chain.jsonl");
  CHECK(f.records.size() == 2);
  CHECK(f.malformed == 1);
}

TEST_CASE("hyperparameter and state prior files") {
  const Dimensions dims{1, 1, 1, 2};
  const auto h = io::hyper_from_json(io::Json::parse(R"({"isotropic": {"V": 5, "nu": 3}})"), dims);
  CHECK(h.models[1].V(0, 1) == 0.0);
  CHECK(h.models[1].V(1, 1) == 5.0);
  CHECK(h.models[0].nu == 3.0);
  CHECK(h.alpha(1, 0) == 1.0);

  const auto s = io::hybrid_prior_from_json(
      io::Json::parse(R"({"components": [{"model": 2, "weight": 1, "mean": [0.5], "cov": [2]}]})"), dims);
  REQUIRE(s.entries.size() == 1);
  CHECK(s.entries[0].model == 1);
  CHECK(s.entries[0].cov(0, 0) == 2.0);
  CHECK_THROWS(io::hybrid_prior_from_json(
      io::Json::parse(R"({"components": [{"model": 3, "weight": 1, "mean": [0], "cov": [1]}]})"), dims));
}

}  // TEST_SUITE

TEST_SUITE("cli") {

TEST_CASE("simulate rejects bad arguments") {
  const auto dir = scratch("cli_sim");
  io::write_params_file(dir / "p.json", systems::example1());
  CHECK(cli::simulate({dir / "p.json", 0, 1, dir / "out"}) == cli::kUsageError);
  CHECK(cli::simulate({dir / "nope.json", 10, 1, dir / "out"}) == cli::kUsageError);
  CHECK(cli::simulate({dir / "p.json", 10, 1, dir / "out"}) == cli::kSuccess);
  CHECK(count_lines(dir / "out" / "data.csv") == 11);
  CHECK(count_lines(dir / "out" / "trajectory.csv") == 12);
}

TEST_CASE("missing input files name the path") {
  const auto dir = scratch("cli_missing");
  spit(dir / "config.json", R"({"data": "absent.csv", "output": "run", "n_x": 1, "m": 2})");
  try {
    cli::load_run_config(dir / "config.json");
    FAIL("expected an error");
  } catch (const io::InputError& e) {
    CHECK(std::string(e.what()).find("absent.csv") != std::string::npos);
  }
  CHECK(cli::identify({dir / "config.json", {}, {}}) == cli::kUsageError);
}

TEST_CASE("identify writes one record per stored sample and is reproducible") {
  const auto dir = scratch("cli_identify");
  const auto cfg = example_run(dir, 10);
  REQUIRE(cli::identify({cfg, {}, {}}) == cli::kSuccess);
  CHECK(count_lines(dir / "run" / "chain.jsonl") == 10);
  CHECK(count_lines(dir / "run" / "loglik.csv") == 11);
  const auto meta = io::read_json_file(dir / "run" / "run_meta.json");
  CHECK(meta.at("status") == "ok");
  CHECK(meta.at("records") == 10);

  REQUIRE(cli::identify({cfg, {}, dir / "again"}) == cli::kSuccess);
  CHECK(slurp(dir / "run" / "chain.jsonl") == slurp(dir / "again" / "chain.jsonl"));
  REQUIRE(cli::identify({cfg, 99u, dir / "other"}) == cli::kSuccess);
  CHECK(slurp(dir / "run" / "chain.jsonl") != slurp(dir / "other" / "chain.jsonl"));
}

TEST_CASE("summarize") {
  const auto dir = scratch("cli_summarize");
  spit(dir / "empty.jsonl", "");
  CHECK(cli::summarize({dir / "empty.jsonl", {}, dir / "s0", 0, true}) == cli::kUsageError);

  const auto p = systems::example1();
  io::write_params_file(dir / "truth.json", p);
  spit(dir / "one.jsonl", io::chain_record(1, p) + "\n");
  REQUIRE(cli::summarize({dir / "one.jsonl", dir / "truth.json", dir / "s1", 0, true}) == cli::kSuccess);
  // Header plus a single bin.
  CHECK(count_lines(dir / "s1" / "histograms" / "A1.csv") == 2);
  CHECK(count_lines(dir / "s1" / "transition_marginals.csv") == 5);
  const auto cov = io::read_json_file(dir / "s1" / "coverage.json");
  CHECK(cov.at("A1").at("covered99") == true);

  std::string many;
  for (int i = 0; i < 10; ++i) many += io::chain_record(static_cast<std::size_t>(i + 1), p) + "\n";
  spit(dir / "bad.jsonl", many + "oops\n");
  CHECK(cli::summarize({dir / "bad.jsonl", {}, dir / "s2", 0, true}) == cli::kRuntimeFailure);
}

TEST_CASE("command line parsing") {
  const char* argv[] = {"jmls", "simulate", "--n", "5"};
  CHECK(cli::run(4, const_cast<char**>(argv)) == cli::kUsageError);
  const char* bad[] = {"jmls", "frobnicate"};
  CHECK(cli::run(2, const_cast<char**>(bad)) == cli::kUsageError);
}

}  // TEST_SUITE
