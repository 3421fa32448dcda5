// Experiment runner: each pipeline stage is a subcommand driven by one
// configuration file, with output directory and seed overridable per run.
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "apcs/apcs.h"

int main(int argc, char** argv) {
  CLI::App app{"adaptive polynomial surrogate inference pipeline"};
  app.require_subcommand(1);

  const std::vector<std::string> stages = {"synthesize-data", "build-surrogate", "adapt",
                                           "sample", "analyze"};
  std::string config_path, out_dir, seed;
  for (const std::string& stage : stages) {
    CLI::App* sub = app.add_subcommand(stage, "run the " + stage + " stage");
    sub->add_option("--config", config_path, "configuration file")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "override [experiment] output_dir");
    sub->add_option("--seed", seed, "override [experiment] seed");
  }

  CLI11_PARSE(app, argc, argv);
  const std::string stage = app.get_subcommands().front()->get_name();

  char err[1024] = {0};
  apcs_config* cfg = nullptr;
  int rc = apcs_config_open(config_path.c_str(), &cfg, err, sizeof err);
  if (rc == APCS_OK && !out_dir.empty())
    rc = apcs_config_set(cfg, "experiment", "output_dir", out_dir.c_str(), err, sizeof err);
  if (rc == APCS_OK && !seed.empty())
    rc = apcs_config_set(cfg, "experiment", "seed", seed.c_str(), err, sizeof err);
  if (rc == APCS_OK) rc = apcs_run_stage(cfg, stage.c_str(), err, sizeof err);
  apcs_config_close(cfg);

  if (rc != APCS_OK) {
    std::fprintf(stderr, "apcs %s: %s\n", stage.c_str(), err);
    return rc == APCS_ERR_CONFIG ? 2 : (rc == APCS_ERR_NUMERICAL ? 3 : 1);
  }
  std::printf("apcs %s: done\n", stage.c_str());
  return 0;
}
