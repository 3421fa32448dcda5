#include "apcs/bayes.hpp"

#include <cmath>
#include <limits>

#include "apcs/errors.hpp"
#include "apcs/rng.hpp"

namespace apcs {

namespace {
constexpr double kLog2Pi = 1.8378770664093454835606594728112;
constexpr double kInf = std::numeric_limits<double>::infinity();
} // namespace

GaussianLikelihood::GaussianLikelihood(Eigen::VectorXd data, double noise_sigma)
    : GaussianLikelihood(Eigen::VectorXd(data),
                         Eigen::VectorXd::Constant(data.size(), noise_sigma)) {}

GaussianLikelihood::GaussianLikelihood(Eigen::VectorXd data, Eigen::VectorXd noise_sigma)
    : data_(std::move(data)), sigma_(std::move(noise_sigma)) {
  if (sigma_.size() != data_.size())
    throw ConfigError("likelihood: noise vector length must match data length");
  if ((sigma_.array() <= 0.0).any())
    throw ConfigError("likelihood: noise sigma must be positive");
  log_const_ = 0.0;
  for (int i = 0; i < static_cast<int>(sigma_.size()); ++i)
    log_const_ -= std::log(sigma_[i]) + 0.5 * kLog2Pi;
}

double GaussianLikelihood::log_likelihood(const Eigen::VectorXd& g) const {
  if (g.size() != data_.size())
    throw ConfigError("likelihood: prediction length must match data length");
  double ss = ((data_ - g).array() / sigma_.array()).square().sum();
  return log_const_ - 0.5 * ss;
}

TemperedLikelihood::TemperedLikelihood(GaussianLikelihood base, double lambda)
    : base_(std::move(base)), lambda_(lambda) {
  if (!(lambda >= 1.0)) throw ConfigError("tempering parameter must be >= 1");
}

double log_posterior_unnormalized(const Prior& prior, const GaussianLikelihood& lik,
                                  const ForwardModel& model, const Eigen::VectorXd& y) {
  if (!prior.in_support(y)) return -kInf;
  return lik.log_likelihood(model.evaluate(y)) + prior.log_density(y);
}

EvidenceEstimate log_evidence_estimate(const Prior& prior, const GaussianLikelihood& lik,
                                       const ForwardModel& model, int n_mc,
                                       std::uint64_t seed) {
  if (n_mc < 1) throw ConfigError("log_evidence_estimate: n_mc must be >= 1");
  Rng rng(seed);
  Eigen::VectorXd logs(n_mc);
  for (int m = 0; m < n_mc; ++m)
    logs[m] = lik.log_likelihood(model.evaluate(prior.sample(rng)));

  double shift = logs.maxCoeff();
  Eigen::ArrayXd scaled = (logs.array() - shift).exp();
  double mean = scaled.mean();
  double var = (scaled - mean).square().sum() / n_mc;
  EvidenceEstimate est;
  est.log_value = shift + std::log(mean);
  est.standard_error = mean > 0 ? std::sqrt(var / n_mc) / mean : 0.0;
  est.n_samples = n_mc;
  return est;
}

} // namespace apcs
