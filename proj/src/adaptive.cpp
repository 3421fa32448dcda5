#include "apcs/adaptive.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "apcs/errors.hpp"
#include "apcs/quadrature.hpp"

namespace apcs {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
} // namespace

BiasingParams::BiasingParams(Eigen::VectorXd mu, Eigen::VectorXd sigma)
    : mean(std::move(mu)), stddev(std::move(sigma)) {
  if (mean.size() != stddev.size())
    throw ConfigError("biasing parameters: mean/stddev length mismatch");
  if ((stddev.array() <= 0.0).any())
    throw ConfigError("biasing parameters: all stddev entries must be positive");
}

InputDistribution BiasingParams::to_distribution() const {
  std::vector<Marginal> marginals;
  marginals.reserve(dimension());
  for (int j = 0; j < dimension(); ++j)
    marginals.push_back(Marginal::gaussian(mean[j], stddev[j]));
  return InputDistribution(std::move(marginals));
}

double BiasingParams::log_density(const Eigen::VectorXd& y) const {
  constexpr double kLog2Pi = 1.8378770664093454835606594728112;
  double lp = 0.0;
  for (int j = 0; j < dimension(); ++j) {
    double z = (y[j] - mean[j]) / stddev[j];
    lp += -0.5 * z * z - std::log(stddev[j]) - 0.5 * kLog2Pi;
  }
  return lp;
}

Eigen::VectorXd BiasingParams::sample(Rng& rng) const {
  Eigen::VectorXd y(dimension());
  for (int j = 0; j < dimension(); ++j) y[j] = mean[j] + stddev[j] * rng.normal();
  return y;
}

double update_lambda(const Eigen::VectorXd& log_likelihoods, double lambda_current,
                     double elite_fraction, double level, double min_step) {
  const long m = log_likelihoods.size();
  if (m < 1) throw ConfigError("update_lambda: empty batch");
  if (!(elite_fraction > 0.0 && elite_fraction < 1.0))
    throw ConfigError("update_lambda: elite fraction must lie in (0,1)");
  if (!(level > 0.0 && level < 1.0))
    throw ConfigError("update_lambda: likelihood level must lie in (0,1)");

  std::vector<double> sorted(log_likelihoods.data(), log_likelihoods.data() + m);
  std::sort(sorted.begin(), sorted.end());
  double shift = sorted.back();
  if (shift == -kInf)
    throw NumericalError("update_lambda: all likelihood values are zero; "
                         "biasing distribution missed the posterior");

  long rank = static_cast<long>(std::ceil((1.0 - elite_fraction) * double(m)));
  rank = std::clamp(rank, 1L, m);
  double log_elite = sorted[rank - 1] - shift; // batch-max normalized
  if (log_elite == -kInf)
    throw NumericalError("update_lambda: elite likelihood level is zero; "
                         "biasing distribution missed the posterior");

  double lambda = log_elite / std::log(level);
  if (std::isfinite(lambda_current) && lambda > lambda_current - min_step)
    lambda = lambda_current - min_step;
  return std::max(lambda, 1.0);
}

namespace {

// Self-normalized weights w_m = L^(1/lambda) l_m, computed with log shifts.
// Returns sum-normalized weights; reports ESS.
Eigen::VectorXd batch_weights(const WeightedBatch& batch, double lambda, double* ess_out) {
  const long m = batch.log_likelihood.size();
  double shift_l = -kInf;
  for (long i = 0; i < m; ++i) shift_l = std::max(shift_l, batch.log_likelihood[i]);
  if (shift_l == -kInf)
    throw NumericalError("degenerate batch: all surrogate likelihoods are zero");

  Eigen::VectorXd logw(m);
  double shift_w = -kInf;
  for (long i = 0; i < m; ++i) {
    logw[i] = (batch.log_likelihood[i] - shift_l) / lambda + batch.log_weight[i];
    shift_w = std::max(shift_w, logw[i]);
  }
  if (shift_w == -kInf)
    throw NumericalError("degenerate batch: all importance weights are zero");

  Eigen::VectorXd w(m);
  double sum = 0.0, sum2 = 0.0;
  for (long i = 0; i < m; ++i) {
    w[i] = std::exp(logw[i] - shift_w);
    sum += w[i];
    sum2 += w[i] * w[i];
  }
  if (ess_out) *ess_out = sum * sum / sum2;
  return w / sum;
}

} // namespace

BiasingParams update_params(const WeightedBatch& batch, double lambda, double sigma_floor,
                            double* ess_out) {
  if (batch.samples.rows() != batch.log_likelihood.size() ||
      batch.samples.rows() != batch.log_weight.size())
    throw ConfigError("update_params: inconsistent batch shapes");

  double ess = 0.0;
  Eigen::VectorXd w = batch_weights(batch, lambda, &ess);
  if (ess_out) *ess_out = ess;
  if (ess < 10.0) {
    std::ostringstream os;
    os << "update_params: degenerate batch, effective sample size " << ess << " < 10";
    throw NumericalError(os.str());
  }

  const int dim = static_cast<int>(batch.samples.cols());
  Eigen::VectorXd mu = batch.samples.transpose() * w;
  Eigen::VectorXd sigma(dim);
  for (int j = 0; j < dim; ++j) {
    double var = ((batch.samples.col(j).array() - mu[j]).square() * w.array()).sum();
    sigma[j] = std::max(std::sqrt(std::max(var, 0.0)), sigma_floor);
  }
  return BiasingParams(std::move(mu), std::move(sigma));
}

double objective_hat(const WeightedBatch& batch, const BiasingParams& v, double lambda) {
  const long m = batch.log_likelihood.size();
  double shift_l = batch.log_likelihood.maxCoeff();
  if (shift_l == -kInf)
    throw NumericalError("objective_hat: all surrogate likelihoods are zero");
  double acc = 0.0;
  for (long i = 0; i < m; ++i) {
    if (batch.log_weight[i] == -kInf) continue;
    double w = std::exp((batch.log_likelihood[i] - shift_l) / lambda + batch.log_weight[i]);
    acc += w * v.log_density(batch.samples.row(i).transpose());
  }
  return acc / double(m);
}

namespace {

QuadratureRule iteration_rule(int dim, CEConfig::GridKind kind, int level) {
  if (kind == CEConfig::GridKind::Smolyak)
    return smolyak_rule({dim, level, Rule1DKind::GaussHermite});
  std::vector<Rule1D> per_dim(dim, gauss_rule(PolynomialFamily::HermiteProbabilist, level));
  return tensor_rule(per_dim);
}

// Surrogate predictions for a whole batch at once (basis matrix + GEMM).
Eigen::MatrixXd predict_batch(const PCSurrogate& surrogate, const Eigen::MatrixXd& samples) {
  const InputDistribution& dist = surrogate.input_distribution();
  const MultiIndexSet& set = surrogate.index_set();
  const std::vector<PolynomialFamily> families = dist.families();
  Eigen::MatrixXd basis(samples.rows(), static_cast<long>(set.size()));
  for (long i = 0; i < samples.rows(); ++i) {
    Eigen::VectorXd z = dist.to_standard(samples.row(i).transpose());
    basis.row(i) = eval_multivariate(set, families, z).transpose();
  }
  return basis * surrogate.coefficients().transpose(); // M x n_d
}

} // namespace

CEResult run_adaptive(const ForwardModel& model, const Prior& prior,
                      const GaussianLikelihood& lik, const CEConfig& config) {
  const int dim = model.input_dim();
  if (config.initial.dimension() != dim)
    throw ConfigError("run_adaptive: initial biasing parameters do not match model dimension");
  if (prior.dimension() != dim)
    throw ConfigError("run_adaptive: prior dimension does not match model dimension");
  if (config.sample_size < 100)
    throw ConfigError("run_adaptive: IS sample size must be at least 100");
  if (!(config.level > 0.0 && config.level < 1.0))
    throw ConfigError("run_adaptive: likelihood level gamma must lie in (0,1)");

  MemoizedModel memo(model);
  const ForwardModel& target = config.reuse_model_evaluations
                                   ? static_cast<const ForwardModel&>(memo)
                                   : model;
  const long base_evals = model.evaluation_count();

  Rng rng(config.seed);
  CEResult result;
  BiasingParams v = config.initial;
  double lambda = kInf;
  double delta = config.min_step;
  const int m_samples = config.sample_size;

  for (int k = 1;; ++k) {
    if (k > config.max_iterations)
      throw NumericalError("run_adaptive: exceeded maximum iteration count " +
                           std::to_string(config.max_iterations));

    InputDistribution dist = v.to_distribution();
    MultiIndexSet set = MultiIndexSet::total_order(dim, config.surrogate_order);
    QuadratureRule rule = iteration_rule(dim, config.grid_kind, config.grid_level);
    PCSurrogate surrogate = PCSurrogate::project(target, dist, set, rule);

    WeightedBatch batch;
    batch.samples.resize(m_samples, dim);
    for (int i = 0; i < m_samples; ++i) batch.samples.row(i) = v.sample(rng).transpose();
    Eigen::MatrixXd pred = predict_batch(surrogate, batch.samples);
    batch.log_likelihood.resize(m_samples);
    batch.log_weight.resize(m_samples);
    for (int i = 0; i < m_samples; ++i) {
      Eigen::VectorXd y = batch.samples.row(i).transpose();
      batch.log_likelihood[i] = lik.log_likelihood(pred.row(i).transpose());
      double lp = prior.log_density(y);
      batch.log_weight[i] = lp == -kInf ? -kInf : lp - v.log_density(y);
    }

    double lambda_next =
        update_lambda(batch.log_likelihood, lambda, config.elite_fraction, config.level, delta);
    if (!std::isfinite(lambda) && config.min_step <= 0.0)
      delta = std::max((lambda_next - 1.0) / config.min_step_divisor, 0.0);

    double ess = 0.0;
    v = update_params(batch, lambda_next, config.sigma_floor, &ess);
    result.trace.push_back(
        {k, lambda_next, v, ess, model.evaluation_count() - base_evals});

    if (lambda_next <= 1.0) break;
    lambda = lambda_next;
  }

  // Optional refinement passes at lambda = 1 (default none).
  for (int pass = 0; pass < config.extra_final_passes; ++pass) {
    InputDistribution dist = v.to_distribution();
    MultiIndexSet set = MultiIndexSet::total_order(dim, config.surrogate_order);
    PCSurrogate surrogate =
        PCSurrogate::project(target, dist, set,
                             iteration_rule(dim, config.grid_kind, config.grid_level));
    WeightedBatch batch;
    batch.samples.resize(m_samples, dim);
    for (int i = 0; i < m_samples; ++i) batch.samples.row(i) = v.sample(rng).transpose();
    Eigen::MatrixXd pred = predict_batch(surrogate, batch.samples);
    batch.log_likelihood.resize(m_samples);
    batch.log_weight.resize(m_samples);
    for (int i = 0; i < m_samples; ++i) {
      Eigen::VectorXd y = batch.samples.row(i).transpose();
      batch.log_likelihood[i] = lik.log_likelihood(pred.row(i).transpose());
      double lp = prior.log_density(y);
      batch.log_weight[i] = lp == -kInf ? -kInf : lp - v.log_density(y);
    }
    double ess = 0.0;
    v = update_params(batch, 1.0, config.sigma_floor, &ess);
    result.trace.push_back({static_cast<int>(result.trace.size()) + 1, 1.0, v, ess,
                            model.evaluation_count() - base_evals});
  }

  // Final surrogate over the final biasing distribution.
  int final_order = config.final_order > 0 ? config.final_order : config.surrogate_order;
  int final_level = config.final_grid_level > 0 ? config.final_grid_level : config.grid_level;
  result.final_surrogate = std::make_shared<PCSurrogate>(PCSurrogate::project(
      target, v.to_distribution(), MultiIndexSet::total_order(dim, final_order),
      iteration_rule(dim, config.grid_kind, final_level)));
  result.final_params = std::move(v);
  result.model_evaluations = model.evaluation_count() - base_evals;
  return result;
}

std::vector<ObjectiveSample> objective_convergence_table(
    const ForwardModel& model, const Prior& prior, const GaussianLikelihood& lik,
    const BiasingParams& biasing, const BiasingParams& eval_at,
    const std::vector<int>& orders, const std::vector<int>& sample_sizes,
    std::uint64_t seed) {
  const int dim = model.input_dim();
  std::vector<ObjectiveSample> out;
  std::uint64_t stream = seed;
  for (int order : orders) {
    InputDistribution dist = biasing.to_distribution();
    MultiIndexSet set = MultiIndexSet::total_order(dim, order);
    std::vector<Rule1D> per_dim(dim, gauss_rule(PolynomialFamily::HermiteProbabilist, order + 1));
    PCSurrogate surrogate = PCSurrogate::project(model, dist, set, tensor_rule(per_dim));

    for (int m : sample_sizes) {
      Rng rng(++stream);
      double acc = 0.0;
      for (int i = 0; i < m; ++i) {
        Eigen::VectorXd y = biasing.sample(rng);
        double lp = prior.log_density(y);
        if (lp == -kInf) continue;
        double logw = lik.log_likelihood(surrogate.evaluate(y)) + lp - biasing.log_density(y);
        acc += std::exp(logw) * eval_at.log_density(y);
      }
      out.push_back({order, m, acc / double(m)});
    }
  }
  return out;
}

} // namespace apcs
