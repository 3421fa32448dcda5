#ifndef APCS_ADAPTIVE_HPP
#define APCS_ADAPTIVE_HPP

#include <memory>
#include <vector>

#include <Eigen/Core>

#include "apcs/bayes.hpp"
#include "apcs/polychaos.hpp"

namespace apcs {

// Reference parameters v of the uncorrelated Gaussian biasing family:
// per-dimension mean and standard deviation.
struct BiasingParams {
  Eigen::VectorXd mean;
  Eigen::VectorXd stddev;

  BiasingParams() = default;
  BiasingParams(Eigen::VectorXd mu, Eigen::VectorXd sigma);

  int dimension() const { return static_cast<int>(mean.size()); }
  InputDistribution to_distribution() const;
  double log_density(const Eigen::VectorXd& y) const;
  Eigen::VectorXd sample(Rng& rng) const;
};

struct CEConfig {
  double elite_fraction = 0.05; // rho
  double level = 1e-3;          // gamma, required in (0,1)
  // Minimum tempering step delta. Zero means: derive it from the first
  // finite tempering value as (lambda_1 - 1) / min_step_divisor.
  double min_step = 0.0;
  double min_step_divisor = 10.0;
  int sample_size = 50000; // M
  int max_iterations = 50;

  enum class GridKind { Tensor, Smolyak };
  int surrogate_order = 2;
  GridKind grid_kind = GridKind::Smolyak;
  int grid_level = 3; // Smolyak level, or points per dimension for Tensor

  int final_order = -1;      // -1: same as surrogate_order
  int final_grid_level = -1; // -1: same as grid_level
  int extra_final_passes = 0;

  double sigma_floor = 1e-6;
  bool reuse_model_evaluations = false; // memoize true-model nodes across iterations
  std::uint64_t seed = 1;

  BiasingParams initial;
};

// One IS batch drawn from p(.; v_k), with surrogate log-likelihoods and log
// importance weights log l_k = log pi - log p(.; v_k) (-inf off-support).
struct WeightedBatch {
  Eigen::MatrixXd samples;        // M x n_y
  Eigen::VectorXd log_likelihood; // untempered
  Eigen::VectorXd log_weight;
};

// Tempering schedule step. Likelihoods are normalized to a batch maximum of
// one, the (1-rho) order statistic L_rho is taken without interpolation, and
// lambda* = ln(L_rho)/ln(gamma), then clamped to at most lambda_current -
// min_step (when lambda_current is finite) and floored at 1.
double update_lambda(const Eigen::VectorXd& log_likelihoods, double lambda_current,
                     double elite_fraction, double level, double min_step);

// Closed-form weighted Gaussian fit: weighted mean and (population) weighted
// standard deviation per dimension under w_m = L^(1/lambda) * l, evaluated
// with a log-shift. sigma is floored; degenerate batches (ESS < 10) throw.
BiasingParams update_params(const WeightedBatch& batch, double lambda,
                            double sigma_floor = 1e-6, double* ess_out = nullptr);

// IS estimate of the tempered cross-entropy objective at v, up to a positive
// batch-dependent scale (likelihoods are normalized to a max of one); the
// argmax over v is unaffected.
double objective_hat(const WeightedBatch& batch, const BiasingParams& v, double lambda);

struct CEIterationRecord {
  int iteration = 0;
  double lambda = 0.0;
  BiasingParams params;
  double ess = 0.0;
  long cumulative_model_evaluations = 0;
};

struct CEResult {
  BiasingParams final_params;
  std::shared_ptr<PCSurrogate> final_surrogate;
  std::vector<CEIterationRecord> trace;
  long model_evaluations = 0;
};

// The full adaptive loop: per-iteration local surrogate over p(.; v_k), IS
// batch, tempering update, closed-form parameter update; terminates after
// the single update performed with lambda = 1 (plus optional extra passes),
// then builds the final surrogate over the final biasing distribution.
CEResult run_adaptive(const ForwardModel& model, const Prior& prior,
                      const GaussianLikelihood& lik, const CEConfig& config);

// Empirical convergence table for the objective estimator: D-hat_N(v) for a
// grid of surrogate orders and sample sizes (no tempering, raw likelihood
// scale, suitable for comparison against an analytic objective).
struct ObjectiveSample {
  int order = 0;
  int sample_size = 0;
  double value = 0.0;
};

std::vector<ObjectiveSample> objective_convergence_table(
    const ForwardModel& model, const Prior& prior, const GaussianLikelihood& lik,
    const BiasingParams& biasing, const BiasingParams& eval_at,
    const std::vector<int>& orders, const std::vector<int>& sample_sizes,
    std::uint64_t seed);

} // namespace apcs

#endif
