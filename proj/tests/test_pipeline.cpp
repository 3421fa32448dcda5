#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "apcs/config.hpp"
#include "apcs/errors.hpp"
#include "apcs/pipeline.hpp"

using namespace apcs;
namespace fs = std::filesystem;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  REQUIRE(is.good());
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

int data_rows(const std::string& path) {
  std::ifstream is(path);
  int rows = 0;
  std::string line;
  while (std::getline(is, line))
    if (!line.empty() && line[0] != '#') ++rows;
  return rows;
}

// Small source-problem configuration that runs in seconds.
ConfigFile tiny_source_config(const std::string& out_dir) {
  std::istringstream text(R"(
[experiment]
problem = source
seed = 7

[model]
mesh_n = 21
dt = 0.005

[method]
order = 2
grid = tensor
level = 3
sample_size = 5000
initial_mean = 0.5
initial_stddev = 0.15
prior_order = 3
prior_grid = smolyak
prior_level = 4

[sampler]
type = independence
steps = 4000
burn_in = 500

[analysis]
bootstrap = 5
grid_n = 80
acf_max_lag = 50
)");
  ConfigFile cfg = ConfigFile::parse(text);
  cfg.set("experiment", "output_dir", out_dir);
  return cfg;
}

} // namespace

TEST_SUITE("pipeline") {

TEST_CASE("config parsing essentials") {
  std::istringstream text(R"(
# comment
[alpha]
x = 1.5       ; trailing comment
name = hello
list = 1, 2.5, -3
flag = true

[beta]
x = 2
)");
  ConfigFile cfg = ConfigFile::parse(text);
  CHECK(cfg.get_double("alpha", "x") == 1.5);
  CHECK(cfg.get("alpha", "name") == "hello");
  CHECK(cfg.get_doubles("alpha", "list") == std::vector<double>{1.0, 2.5, -3.0});
  CHECK(cfg.get_bool_or("alpha", "flag", false));
  CHECK(cfg.get_int("beta", "x") == 2);
  CHECK(cfg.get_int_or("beta", "missing", 9) == 9);
  CHECK_THROWS_AS(cfg.get("gamma", "x"), ConfigError);
  CHECK_THROWS_AS(cfg.get_int("alpha", "x"), ConfigError);

  std::string d1 = cfg.digest();
  cfg.set("beta", "x", "3");
  CHECK(cfg.digest() != d1);
}

TEST_CASE("config rejects malformed input") {
  std::istringstream no_section("x = 1\n");
  CHECK_THROWS_AS(ConfigFile::parse(no_section), ConfigError);
  std::istringstream dup("[a]\nx = 1\nx = 2\n");
  CHECK_THROWS_AS(ConfigFile::parse(dup), ConfigError);
  std::istringstream noeq("[a]\njust words\n");
  CHECK_THROWS_AS(ConfigFile::parse(noeq), ConfigError);
}

TEST_CASE("problem construction from config") {
  ConfigFile cfg = tiny_source_config("/tmp/apcs_nowhere");
  Problem p = build_problem(cfg);
  CHECK(p.name == "source");
  CHECK(p.model->input_dim() == 2);
  CHECK(p.model->output_dim() == 18);
  CHECK(p.prior.dimension() == 2);
  CHECK(p.true_params[0] == 0.25);

  ConfigFile heat = cfg;
  heat.set("experiment", "problem", "heat");
  Problem ph = build_problem(heat);
  CHECK(ph.model->input_dim() == 9);
  CHECK(ph.model->output_dim() == 50);
  CHECK(ph.param_names.front() == "a0");
  CHECK(ph.param_names.back() == "b4");
  CHECK(ph.true_params[1] == 1.5);
  CHECK(ph.true_params[0] == 0.0);
}

TEST_CASE("biasing round trip") {
  std::string path = (fs::temp_directory_path() / "apcs_bias_test.tsv").string();
  Eigen::VectorXd mu(2), sd(2);
  mu << 0.25, -1.0;
  sd << 0.1, 2.0;
  save_biasing(path, BiasingParams(mu, sd), {"u", "v"});
  BiasingParams back = load_biasing(path);
  CHECK(back.mean == mu);
  CHECK(back.stddev == sd);
  fs::remove(path);
}

TEST_CASE("source pipeline end to end at tiny scale") {
  fs::path dir = fs::temp_directory_path() / "apcs_pipe_test";
  fs::remove_all(dir);
  ConfigFile cfg = tiny_source_config(dir.string());

  StageReport synth = run_stage(cfg, "synthesize-data");
  CHECK(data_rows((dir / "data.tsv").string()) == 18);
  CHECK(synth.model_evaluations == 1);

  StageReport prior_build = run_stage(cfg, "build-surrogate");
  CHECK(fs::exists(dir / "prior_surrogate.tsv"));
  CHECK(prior_build.model_evaluations > 0);

  StageReport adapt = run_stage(cfg, "adapt");
  CHECK(fs::exists(dir / "trace.tsv"));
  CHECK(fs::exists(dir / "biasing.tsv"));
  CHECK(fs::exists(dir / "surrogate.tsv"));
  CHECK(adapt.model_evaluations > 0);

  // The trace ends at lambda = 1 and the biasing lands near the truth.
  {
    std::ifstream is(dir / "trace.tsv");
    std::string line, last;
    while (std::getline(is, line))
      if (!line.empty() && line[0] != '#') last = line;
    std::istringstream row(last);
    int k;
    double lambda;
    row >> k >> lambda;
    CHECK(lambda == 1.0);
  }
  BiasingParams final_bias = load_biasing((dir / "biasing.tsv").string());
  CHECK(std::abs(final_bias.mean[0] - 0.25) < 0.1);
  CHECK(std::abs(final_bias.mean[1] - 0.25) < 0.1);

  run_stage(cfg, "sample");
  CHECK(fs::exists(dir / "chain.tsv"));
  CHECK(fs::exists(dir / "chain.tsv.meta"));

  run_stage(cfg, "analyze");
  CHECK(fs::exists(dir / "kde_0_1.tsv"));
  CHECK(fs::exists(dir / "acf.tsv"));
  CHECK(fs::exists(dir / "analyze.manifest"));

  // Determinism: a second run into a fresh directory reproduces every
  // artifact byte for byte.
  fs::path dir2 = fs::temp_directory_path() / "apcs_pipe_test2";
  fs::remove_all(dir2);
  ConfigFile cfg2 = tiny_source_config(dir2.string());
  run_stage(cfg2, "synthesize-data");
  run_stage(cfg2, "adapt");
  run_stage(cfg2, "sample");
  for (const char* name : {"data.tsv", "trace.tsv", "biasing.tsv", "surrogate.tsv",
                           "chain.tsv"})
    CHECK(read_file((dir / name).string()) == read_file((dir2 / name).string()));

  // Re-running a later stage does not re-trigger model evaluations.
  StageReport again = run_stage(cfg, "analyze");
  CHECK(again.model_evaluations == 0);

  fs::remove_all(dir);
  fs::remove_all(dir2);
}

TEST_CASE("unknown stage and missing inputs are configuration errors") {
  ConfigFile cfg = tiny_source_config((fs::temp_directory_path() / "apcs_pipe_err").string());
  CHECK_THROWS_AS(run_stage(cfg, "bogus"), ConfigError);
  // Sampling without data or surrogate files.
  CHECK_THROWS_AS(run_stage(cfg, "sample"), ConfigError);
  fs::remove_all(fs::temp_directory_path() / "apcs_pipe_err");
}

} // TEST_SUITE
