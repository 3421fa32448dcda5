#ifndef APCS_BAYES_HPP
#define APCS_BAYES_HPP

#include <Eigen/Core>

#include "apcs/distributions.hpp"
#include "apcs/polychaos.hpp"

namespace apcs {

// Additive independent Gaussian noise likelihood. The full normalizing
// constant is included, so the tempered density exponentiates a proper
// density; the constant cancels inside cross-entropy weight ratios anyway.
class GaussianLikelihood {
public:
  GaussianLikelihood(Eigen::VectorXd data, double noise_sigma);
  GaussianLikelihood(Eigen::VectorXd data, Eigen::VectorXd noise_sigma);

  const Eigen::VectorXd& data() const { return data_; }
  const Eigen::VectorXd& noise_sigma() const { return sigma_; }
  int dimension() const { return static_cast<int>(data_.size()); }

  // log L(g) = -sum (d_i - g_i)^2 / (2 sigma_i^2) + log normalizing constant
  double log_likelihood(const Eigen::VectorXd& g) const;
  double log_normalizing_constant() const { return log_const_; }

private:
  Eigen::VectorXd data_;
  Eigen::VectorXd sigma_;
  double log_const_;
};

// L(g; lambda) = L(g)^(1/lambda), lambda >= 1.
class TemperedLikelihood {
public:
  TemperedLikelihood(GaussianLikelihood base, double lambda);

  double lambda() const { return lambda_; }
  const GaussianLikelihood& base() const { return base_; }
  double log_tempered(const Eigen::VectorXd& g) const {
    return base_.log_likelihood(g) / lambda_;
  }

private:
  GaussianLikelihood base_;
  double lambda_;
};

// log L(G(y)) + log pi(y); -infinity outside the prior support without
// evaluating the model.
double log_posterior_unnormalized(const Prior& prior, const GaussianLikelihood& lik,
                                  const ForwardModel& model, const Eigen::VectorXd& y);

struct EvidenceEstimate {
  double log_value = 0.0;
  double standard_error = 0.0; // of log_value
  int n_samples = 0;
};

// Prior-sample Monte Carlo estimate of log I = log E_pi[L(G(y))].
EvidenceEstimate log_evidence_estimate(const Prior& prior, const GaussianLikelihood& lik,
                                       const ForwardModel& model, int n_mc,
                                       std::uint64_t seed);

} // namespace apcs

#endif
