#ifndef APCS_PIPELINE_HPP
#define APCS_PIPELINE_HPP

#include <memory>
#include <string>
#include <vector>

#include "apcs/adaptive.hpp"
#include "apcs/config.hpp"
#include "apcs/models.hpp"

namespace apcs {

// Physical problem assembled from a configuration: forward model, prior and
// naming, shared by every stage.
struct Problem {
  std::string name; // "source" or "heat"
  std::shared_ptr<ForwardModel> model;
  Prior prior;
  std::vector<std::string> param_names;
  Eigen::VectorXd true_params; // synthesis truth
  double flux_period = 0.0;    // heat only
};

Problem build_problem(const ConfigFile& cfg);
// Same physics on a refined mesh, used only for data synthesis.
std::shared_ptr<ForwardModel> build_fine_model(const ConfigFile& cfg, const Problem& p);

CEConfig make_ce_config(const ConfigFile& cfg, const Problem& p);

// Data files carry rows "time sensor value" in model output order.
void write_data(const std::string& path, const Problem& p, const Eigen::VectorXd& values,
                const std::string& provenance);
Eigen::VectorXd load_data(const std::string& path, int expected_size);

void save_biasing(const std::string& path, const BiasingParams& v,
                  const std::vector<std::string>& names);
BiasingParams load_biasing(const std::string& path);

struct StageReport {
  std::string stage;
  std::vector<std::string> outputs;
  long model_evaluations = 0;
  double wall_seconds = 0.0;
};

// Stage dispatch: "synthesize-data", "build-surrogate", "adapt", "sample",
// "analyze". Every output lands under [experiment] output_dir; a manifest
// file per stage records config digest, outputs, evaluation counts and wall
// time.
StageReport run_stage(const ConfigFile& cfg, const std::string& stage);

extern const char* const kVersion;

} // namespace apcs

#endif
