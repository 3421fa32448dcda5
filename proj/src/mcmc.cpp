#include "apcs/mcmc.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <Eigen/Cholesky>

#include "apcs/errors.hpp"
#include "apcs/rng.hpp"

namespace apcs {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// log(1 - e^a) for a < 0.
double log1mexp(double a) {
  if (a >= 0.0) return -kInf;
  return a > -0.693147180559945 ? std::log(-std::expm1(a)) : std::log1p(-std::exp(a));
}
} // namespace

double Chain::acceptance_rate() const {
  if (accepted.empty()) return 0.0;
  long n = 0;
  for (char a : accepted) n += a != 0;
  return double(n) / double(accepted.size());
}

Eigen::VectorXd Chain::component(int j) const {
  return samples.col(j).tail(length() - burn_in);
}

Eigen::VectorXd Chain::post_burn_in_mean() const {
  return samples.bottomRows(length() - burn_in).colwise().mean();
}

Eigen::MatrixXd Chain::post_burn_in_covariance() const {
  Eigen::MatrixXd x = samples.bottomRows(length() - burn_in);
  Eigen::RowVectorXd mu = x.colwise().mean();
  x.rowwise() -= mu;
  return x.transpose() * x / double(x.rows() - 1);
}

Chain independence_sampler(const LogDensity& log_target, const BiasingParams& proposal,
                           const Eigen::VectorXd& init, int n_steps, int burn_in,
                           std::uint64_t seed) {
  if (n_steps < 1 || burn_in < 0 || burn_in >= n_steps)
    throw ConfigError("independence_sampler: invalid step/burn-in counts");
  Rng rng(seed);
  const int dim = static_cast<int>(init.size());

  Chain chain;
  chain.samples.resize(n_steps, dim);
  chain.log_density.resize(n_steps);
  chain.accepted.resize(n_steps, 0);
  chain.burn_in = burn_in;
  chain.sampler = "independence";
  chain.seed = seed;

  Eigen::VectorXd y = init;
  double lt = log_target(y);
  if (lt == -kInf)
    throw ConfigError("independence_sampler: initial state has zero target density");
  double lp = proposal.log_density(y);

  for (int t = 0; t < n_steps; ++t) {
    Eigen::VectorXd cand = proposal.sample(rng);
    double lt_cand = log_target(cand);
    bool accept = false;
    if (lt_cand > -kInf) {
      double lp_cand = proposal.log_density(cand);
      double log_alpha = (lt_cand - lt) + (lp - lp_cand);
      accept = log_alpha >= 0.0 || std::log(rng.uniform()) < log_alpha;
      if (accept) {
        y = std::move(cand);
        lt = lt_cand;
        lp = lp_cand;
      }
    }
    chain.samples.row(t) = y.transpose();
    chain.log_density[t] = lt;
    chain.accepted[t] = accept;
  }
  return chain;
}

Chain random_walk_sampler(const LogDensity& log_target, const RandomWalkOptions& options,
                          const Eigen::VectorXd& init, int n_steps, int burn_in,
                          std::uint64_t seed) {
  if (n_steps < 1 || burn_in < 0 || burn_in >= n_steps)
    throw ConfigError("random_walk_sampler: invalid step/burn-in counts");
  if (options.dr_stages < 0 || options.dr_stages > 1)
    throw ConfigError("random_walk_sampler: dr_stages must be 0 or 1");
  Rng rng(seed);
  const int dim = static_cast<int>(init.size());
  const double scale = options.scale > 0 ? options.scale : 2.38 * 2.38 / double(dim);

  Eigen::MatrixXd cov = options.initial_covariance.size()
                            ? options.initial_covariance
                            : Eigen::MatrixXd::Identity(dim, dim);
  auto factor = [&](Eigen::MatrixXd c) {
    Eigen::LLT<Eigen::MatrixXd> llt(c);
    if (llt.info() != Eigen::Success) {
      std::fprintf(stderr, "random_walk_sampler: degenerate proposal covariance, jittering\n");
      c += (c.trace() / dim * 1e-6 + 1e-12) * Eigen::MatrixXd::Identity(dim, dim);
      llt.compute(c);
      if (llt.info() != Eigen::Success)
        throw NumericalError("random_walk_sampler: proposal covariance not positive definite");
    }
    return llt;
  };
  Eigen::LLT<Eigen::MatrixXd> llt = factor(cov);
  Eigen::MatrixXd chol = llt.matrixL();

  // log N(b; a, cov) up to the shared constant.
  auto log_q = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    Eigen::VectorXd z = chol.triangularView<Eigen::Lower>().solve(b - a);
    return -0.5 * z.squaredNorm();
  };
  auto draw = [&](const Eigen::VectorXd& center, double shrink) {
    Eigen::VectorXd xi(dim);
    for (int j = 0; j < dim; ++j) xi[j] = rng.normal();
    return Eigen::VectorXd(center + std::sqrt(shrink) * (chol * xi));
  };

  Chain chain;
  chain.samples.resize(n_steps, dim);
  chain.log_density.resize(n_steps);
  chain.accepted.resize(n_steps, 0);
  chain.burn_in = burn_in;
  chain.sampler = options.dr_stages > 0 ? "dram" : "am";
  chain.seed = seed;

  Eigen::VectorXd y = init;
  double lt = log_target(y);
  if (lt == -kInf)
    throw ConfigError("random_walk_sampler: initial state has zero target density");

  // Running moments of the whole history for covariance adaptation.
  Eigen::VectorXd hist_sum = Eigen::VectorXd::Zero(dim);
  Eigen::MatrixXd hist_outer = Eigen::MatrixXd::Zero(dim, dim);

  for (int t = 0; t < n_steps; ++t) {
    Eigen::VectorXd cand1 = draw(y, 1.0);
    double lt1 = log_target(cand1);
    double log_a1 = lt1 - lt; // symmetric proposal
    bool accept = log_a1 >= 0.0 || std::log(rng.uniform()) < log_a1;
    if (accept) {
      y = std::move(cand1);
      lt = lt1;
    } else if (options.dr_stages > 0) {
      // One delayed-rejection stage with a shrunk proposal. The stage-two
      // proposal density is symmetric in (x, y2) and cancels; the stage-one
      // densities toward y1 do not.
      Eigen::VectorXd cand2 = draw(y, options.dr_shrink);
      double lt2 = log_target(cand2);
      if (lt2 > -kInf) {
        double a1_rev = std::min(0.0, lt1 - lt2); // log alpha1(y2 -> y1)
        double a1_fwd = std::min(0.0, lt1 - lt);
        double log_num = lt2 + log_q(cand2, cand1) + log1mexp(a1_rev);
        double log_den = lt + log_q(y, cand1) + log1mexp(a1_fwd);
        double log_a2 = log_num - log_den;
        if (log_a2 >= 0.0 || std::log(rng.uniform()) < log_a2) {
          y = std::move(cand2);
          lt = lt2;
          accept = true;
        }
      }
    }

    chain.samples.row(t) = y.transpose();
    chain.log_density[t] = lt;
    chain.accepted[t] = accept;

    if (options.adapt) {
      hist_sum += y;
      hist_outer.noalias() += y * y.transpose();
      int n_hist = t + 1;
      if (n_hist >= options.adapt_start && n_hist % options.adapt_interval == 0) {
        Eigen::VectorXd mu = hist_sum / n_hist;
        Eigen::MatrixXd c =
            hist_outer / n_hist - mu * mu.transpose() +
            1e-10 * Eigen::MatrixXd::Identity(dim, dim);
        cov = scale * c;
        llt = factor(cov);
        chol = llt.matrixL();
      }
    }
  }
  return chain;
}

Eigen::VectorXd autocorrelation(const Eigen::VectorXd& series, int max_lag) {
  const long n = series.size();
  if (max_lag < 0 || max_lag >= n)
    throw ConfigError("autocorrelation: max_lag must lie in [0, n)");
  double mean = series.mean();
  Eigen::VectorXd centered = series.array() - mean;
  double c0 = centered.squaredNorm() / double(n);
  Eigen::VectorXd rho(max_lag + 1);
  rho[0] = 1.0;
  if (c0 <= 0.0) {
    rho.tail(max_lag).setZero();
    return rho;
  }
  for (int lag = 1; lag <= max_lag; ++lag)
    rho[lag] = centered.head(n - lag).dot(centered.tail(n - lag)) / (double(n) * c0);
  return rho;
}

double effective_sample_size(const Eigen::VectorXd& series) {
  const long n = series.size();
  if (n < 1000) throw ConfigError("effective_sample_size: need at least 1000 samples");
  double mean = series.mean();
  Eigen::VectorXd centered = series.array() - mean;
  double c0 = centered.squaredNorm() / double(n);
  if (c0 <= 0.0) return 0.0; // degenerate constant chain
  double acc = 0.0;
  for (long lag = 1; lag < n; ++lag) {
    double rho = centered.head(n - lag).dot(centered.tail(n - lag)) / (double(n) * c0);
    if (rho <= 0.0) break; // initial positive sequence truncation
    acc += rho;
  }
  return double(n) / (1.0 + 2.0 * acc);
}

void save_chain(const std::string& path, const Chain& chain,
                const std::vector<std::string>& names) {
  if (static_cast<long>(names.size()) != chain.samples.cols())
    throw ConfigError("save_chain: name count must match chain dimension");
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot open chain file for writing: " + path);
  for (std::size_t j = 0; j < names.size(); ++j) os << (j ? "\t" : "") << names[j];
  os << '\n';
  char buf[32];
  for (int t = 0; t < chain.length(); ++t) {
    for (long j = 0; j < chain.samples.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", chain.samples(t, j));
      os << (j ? "\t" : "") << buf;
    }
    os << '\n';
  }

  std::ofstream meta(path + ".meta");
  meta << "# apcs chain metadata\n";
  meta << "sampler\t" << chain.sampler << '\n';
  meta << "seed\t" << chain.seed << '\n';
  meta << "steps\t" << chain.length() << '\n';
  meta << "burn_in\t" << chain.burn_in << '\n';
  std::snprintf(buf, sizeof buf, "%.6f", chain.acceptance_rate());
  meta << "acceptance_rate\t" << buf << '\n';
}

Chain load_chain(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open chain file: " + path);
  std::string header;
  if (!std::getline(is, header)) throw ConfigError("chain file is empty: " + path);
  int dim = 1;
  for (char c : header) dim += c == '\t';

  std::vector<double> values;
  double v;
  while (is >> v) values.push_back(v);
  if (values.empty() || values.size() % dim != 0)
    throw ConfigError("chain file has malformed sample rows: " + path);

  Chain chain;
  long rows = static_cast<long>(values.size()) / dim;
  chain.samples.resize(rows, dim);
  for (long t = 0; t < rows; ++t)
    for (int j = 0; j < dim; ++j) chain.samples(t, j) = values[t * dim + j];
  chain.log_density = Eigen::VectorXd::Zero(rows);

  std::ifstream meta(path + ".meta");
  if (meta) {
    std::string line;
    while (std::getline(meta, line)) {
      std::istringstream ls(line);
      std::string key;
      ls >> key;
      if (key == "sampler")
        ls >> chain.sampler;
      else if (key == "seed")
        ls >> chain.seed;
      else if (key == "burn_in")
        ls >> chain.burn_in;
    }
  }
  return chain;
}

} // namespace apcs
