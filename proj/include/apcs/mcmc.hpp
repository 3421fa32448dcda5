#ifndef APCS_MCMC_HPP
#define APCS_MCMC_HPP

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "apcs/adaptive.hpp"

namespace apcs {

using LogDensity = std::function<double(const Eigen::VectorXd&)>;

struct Chain {
  Eigen::MatrixXd samples; // n_steps x n_y
  Eigen::VectorXd log_density;
  std::vector<char> accepted;
  int burn_in = 0;
  std::string sampler;
  std::uint64_t seed = 0;

  int length() const { return static_cast<int>(samples.rows()); }
  double acceptance_rate() const;
  // Post-burn-in view of one component.
  Eigen::VectorXd component(int j) const;
  Eigen::VectorXd post_burn_in_mean() const;
  Eigen::MatrixXd post_burn_in_covariance() const;
};

// Metropolis-Hastings independence sampler: proposals drawn from the fixed
// biasing distribution regardless of the current state; ratios in log space.
Chain independence_sampler(const LogDensity& log_target, const BiasingParams& proposal,
                           const Eigen::VectorXd& init, int n_steps, int burn_in,
                           std::uint64_t seed);

struct RandomWalkOptions {
  Eigen::MatrixXd initial_covariance; // SPD; defaults to identity if empty
  bool adapt = true;
  int adapt_start = 1000;    // step at which covariance adaptation begins
  int adapt_interval = 100;  // steps between covariance refreshes
  double scale = -1.0;       // multiplier on sample covariance; -1 => 2.38^2/n
  int dr_stages = 1;         // 0 or 1 delayed-rejection stages
  double dr_shrink = 0.25;   // covariance factor of the second-stage proposal
};

// Adaptive Gaussian random walk with one optional delayed-rejection stage.
Chain random_walk_sampler(const LogDensity& log_target, const RandomWalkOptions& options,
                          const Eigen::VectorXd& init, int n_steps, int burn_in,
                          std::uint64_t seed);

// Empirical normalized autocorrelation rho(0..max_lag), rho(0) = 1.
Eigen::VectorXd autocorrelation(const Eigen::VectorXd& series, int max_lag);

// n / (1 + 2 sum rho(l)) with initial-positive-sequence truncation; returns
// 0 for a degenerate (constant) series.
double effective_sample_size(const Eigen::VectorXd& series);

void save_chain(const std::string& path, const Chain& chain,
                const std::vector<std::string>& names);
Chain load_chain(const std::string& path);

} // namespace apcs

#endif
