#include "apcs/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "apcs/analysis.hpp"
#include "apcs/bayes.hpp"
#include "apcs/errors.hpp"
#include "apcs/mcmc.hpp"
#include "apcs/rng.hpp"

namespace apcs {

const char* const kVersion = "0.1.0";

namespace {

// Per-stage seed offsets from the master seed, so stages are independently
// reproducible.
constexpr std::uint64_t kSeedSynthesize = 101;
constexpr std::uint64_t kSeedAdapt = 202;
constexpr std::uint64_t kSeedSample = 303;
constexpr std::uint64_t kSeedAnalyze = 404;

std::string g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot open output file: " + path);
  return os;
}

std::string out_dir(const ConfigFile& cfg) {
  std::string dir = cfg.get("experiment", "output_dir");
  std::filesystem::create_directories(dir);
  return dir;
}

std::string out_path(const ConfigFile& cfg, const std::string& name) {
  return out_dir(cfg) + "/" + name;
}

std::uint64_t master_seed(const ConfigFile& cfg) {
  return cfg.get_u64_or("experiment", "seed", 1);
}

Eigen::VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<long>(v.size()));
}

// Scalar entries broadcast across the dimension; lists must match it.
Eigen::VectorXd vector_entry(const ConfigFile& cfg, const std::string& section,
                             const std::string& key, int dim,
                             const Eigen::VectorXd& fallback) {
  if (!cfg.has(section, key)) return fallback;
  std::vector<double> v = cfg.get_doubles(section, key);
  if (v.size() == 1) return Eigen::VectorXd::Constant(dim, v[0]);
  if (static_cast<int>(v.size()) != dim)
    throw ConfigError("[" + section + "] " + key + ": expected 1 or " +
                      std::to_string(dim) + " values");
  return to_vector(v);
}

double noise_sigma(const ConfigFile& cfg) {
  return cfg.get_double_or("data", "noise_sigma", 0.1);
}

std::string data_path(const ConfigFile& cfg) {
  return cfg.get_or("data", "path", out_path(cfg, "data.tsv"));
}

GaussianLikelihood make_likelihood(const ConfigFile& cfg, const Problem& p) {
  Eigen::VectorXd d = load_data(data_path(cfg), p.model->output_dim());
  return GaussianLikelihood(std::move(d), noise_sigma(cfg));
}

Eigen::VectorXd heat_measurement_times(const HeatModelConfig& mc) {
  Eigen::VectorXd t(mc.n_times);
  for (int i = 0; i < mc.n_times; ++i) t[i] = (i + 1) * mc.horizon / mc.n_times;
  return t;
}

void write_manifest(const ConfigFile& cfg, const StageReport& report) {
  std::ofstream os = open_out(out_path(cfg, report.stage + ".manifest"));
  os << "# apcs stage manifest\n";
  os << "stage\t" << report.stage << '\n';
  os << "version\t" << kVersion << '\n';
  os << "config_digest\t" << cfg.digest() << '\n';
  os << "model_evaluations\t" << report.model_evaluations << '\n';
  os << "wall_seconds\t" << g17(report.wall_seconds) << '\n';
  for (const std::string& path : report.outputs) {
    if (!std::filesystem::exists(path))
      throw NumericalError("manifest lists a missing output: " + path);
    os << "output\t" << path << '\n';
  }
}

// The build-surrogate stage reads prior_* keys so one config can hold both a
// prior-surrogate spec and an adaptive spec.
QuadratureRule prior_rule(const ConfigFile& cfg, const Problem& p) {
  const int dim = p.prior.dimension();
  const bool uniform = p.prior.family(0) == PolynomialFamily::Legendre;
  std::string grid =
      cfg.get_or("method", "prior_grid", cfg.get_or("method", "grid", "smolyak"));
  std::string rule = cfg.get_or("method", "prior_rule",
                                cfg.get_or("method", "rule", uniform ? "cc" : "gauss"));
  int level = cfg.has("method", "prior_level") ? cfg.get_int("method", "prior_level")
                                               : cfg.get_int_or("method", "level", 3);
  if (grid == "tensor") {
    Rule1D r = rule == "cc" ? clenshaw_curtis_rule(level)
                            : gauss_rule(p.prior.family(0), level);
    return tensor_rule(std::vector<Rule1D>(static_cast<std::size_t>(dim), r));
  }
  if (grid != "smolyak") throw ConfigError("[method] grid: expected smolyak or tensor");
  SparseGridSpec spec;
  spec.dimension = dim;
  spec.level = level;
  spec.kind = rule == "cc" ? Rule1DKind::ClenshawCurtis
                           : (uniform ? Rule1DKind::GaussLegendre : Rule1DKind::GaussHermite);
  return smolyak_rule(spec);
}

std::string surrogate_path(const ConfigFile& cfg) {
  return cfg.get_or("method", "surrogate_out", out_path(cfg, "surrogate.tsv"));
}

std::string biasing_path(const ConfigFile& cfg) {
  return cfg.get_or("method", "biasing_out", out_path(cfg, "biasing.tsv"));
}

StageReport stage_synthesize(const ConfigFile& cfg, const Problem& p) {
  std::shared_ptr<ForwardModel> fine = build_fine_model(cfg, p);
  Eigen::VectorXd clean = fine->evaluate(p.true_params);
  double sigma = noise_sigma(cfg);
  Rng rng(master_seed(cfg) + kSeedSynthesize);
  Eigen::VectorXd noisy = clean;
  for (long i = 0; i < noisy.size(); ++i) noisy[i] += sigma * rng.normal();

  std::ostringstream prov;
  prov << "problem=" << p.name << " noise_sigma=" << g17(sigma)
       << " seed=" << master_seed(cfg) + kSeedSynthesize << " truth=";
  for (long i = 0; i < p.true_params.size(); ++i)
    prov << (i ? "," : "") << g17(p.true_params[i]);

  StageReport report;
  report.stage = "synthesize-data";
  std::string path = data_path(cfg);
  write_data(path, p, noisy, prov.str());
  report.outputs.push_back(path);
  report.model_evaluations = fine->evaluation_count();
  return report;
}

StageReport stage_build_surrogate(const ConfigFile& cfg, const Problem& p) {
  int order = cfg.has("method", "prior_order") ? cfg.get_int("method", "prior_order")
                                               : cfg.get_int_or("method", "order", 2);
  MultiIndexSet set = MultiIndexSet::total_order(p.prior.dimension(), order);
  QuadratureRule rule = prior_rule(cfg, p);
  PCSurrogate s = PCSurrogate::project(*p.model, p.prior, set, rule);

  StageReport report;
  report.stage = "build-surrogate";
  std::string path =
      cfg.get_or("method", "prior_surrogate_out", out_path(cfg, "prior_surrogate.tsv"));
  s.save_file(path);
  report.outputs.push_back(path);
  report.model_evaluations = s.build_evaluations();
  return report;
}

void write_trace(const std::string& path, const CEResult& result,
                 const std::vector<std::string>& names) {
  std::ofstream os = open_out(path);
  os << "# k\tlambda";
  for (const std::string& n : names) os << "\tmu_" << n;
  for (const std::string& n : names) os << "\tsigma_" << n;
  os << "\tess\tcum_evals\n";
  for (const CEIterationRecord& rec : result.trace) {
    os << rec.iteration << '\t' << g17(rec.lambda);
    for (long j = 0; j < rec.params.mean.size(); ++j) os << '\t' << g17(rec.params.mean[j]);
    for (long j = 0; j < rec.params.stddev.size(); ++j)
      os << '\t' << g17(rec.params.stddev[j]);
    os << '\t' << g17(rec.ess) << '\t' << rec.cumulative_model_evaluations << '\n';
  }
}

StageReport stage_adapt(const ConfigFile& cfg, const Problem& p) {
  GaussianLikelihood lik = make_likelihood(cfg, p);
  CEConfig ce = make_ce_config(cfg, p);
  CEResult result = run_adaptive(*p.model, p.prior, lik, ce);

  StageReport report;
  report.stage = "adapt";
  std::string trace = out_path(cfg, "trace.tsv");
  write_trace(trace, result, p.param_names);
  report.outputs.push_back(trace);
  std::string bias = biasing_path(cfg);
  save_biasing(bias, result.final_params, p.param_names);
  report.outputs.push_back(bias);
  std::string surr = surrogate_path(cfg);
  result.final_surrogate->save_file(surr);
  report.outputs.push_back(surr);
  report.model_evaluations = result.model_evaluations;
  return report;
}

StageReport stage_sample(const ConfigFile& cfg, const Problem& p) {
  GaussianLikelihood lik = make_likelihood(cfg, p);
  const bool exact = cfg.get_bool_or("sampler", "use_exact_model", false);
  std::shared_ptr<ForwardModel> target_model;
  if (exact) {
    target_model = p.model;
  } else {
    std::string path = cfg.get_or("sampler", "surrogate", surrogate_path(cfg));
    target_model = std::make_shared<PCSurrogate>(PCSurrogate::load_file(path));
  }
  LogDensity log_target = [&](const Eigen::VectorXd& y) {
    return log_posterior_unnormalized(p.prior, lik, *target_model, y);
  };

  const int dim = p.prior.dimension();
  std::string type = cfg.get_or("sampler", "type", "independence");
  int steps = cfg.get_int_or("sampler", "steps", 100000);
  int burn_in = cfg.get_int_or("sampler", "burn_in", steps / 10);
  std::uint64_t seed = master_seed(cfg) + kSeedSample;

  std::string bias_path = cfg.get_or("sampler", "biasing", biasing_path(cfg));
  bool have_biasing = std::filesystem::exists(bias_path);
  BiasingParams biasing;
  if (have_biasing) biasing = load_biasing(bias_path);

  Eigen::VectorXd init = vector_entry(cfg, "sampler", "init", dim,
                                      have_biasing ? biasing.mean : p.prior.mean());

  Chain chain;
  if (type == "independence") {
    if (!have_biasing)
      throw ConfigError("independence sampler needs a biasing file: " + bias_path);
    chain = independence_sampler(log_target, biasing, init, steps, burn_in, seed);
  } else if (type == "dram" || type == "am") {
    RandomWalkOptions opts;
    opts.dr_stages = type == "dram" ? 1 : 0;
    opts.adapt_start = cfg.get_int_or("sampler", "adapt_start", 1000);
    opts.adapt_interval = cfg.get_int_or("sampler", "adapt_interval", 100);
    Eigen::VectorXd var(dim);
    if (have_biasing) {
      var = biasing.stddev.array().square();
    } else {
      for (int j = 0; j < dim; ++j) {
        const Marginal& m = p.prior.marginal(j);
        var[j] = m.kind == Marginal::Kind::Gaussian
                     ? m.p2 * m.p2
                     : (m.p2 - m.p1) * (m.p2 - m.p1) / 12.0;
      }
    }
    opts.initial_covariance = (2.38 * 2.38 / dim) * var.asDiagonal().toDenseMatrix();
    chain = random_walk_sampler(log_target, opts, init, steps, burn_in, seed);
  } else {
    throw ConfigError("[sampler] type: expected independence, dram or am");
  }

  StageReport report;
  report.stage = "sample";
  std::string path = out_path(cfg, cfg.get_or("sampler", "chain_name", "chain.tsv"));
  save_chain(path, chain, p.param_names);
  report.outputs.push_back(path);
  report.outputs.push_back(path + ".meta");
  report.model_evaluations = exact ? p.model->evaluation_count() : 0;
  return report;
}

std::vector<std::pair<int, int>> parse_pairs(const ConfigFile& cfg, const Problem& p) {
  std::string text = cfg.get_or("analysis", "pairs",
                                p.name == "heat" ? "1:5,4:8" : "0:1");
  std::vector<std::pair<int, int>> pairs;
  std::istringstream is(text);
  std::string tok;
  while (std::getline(is, tok, ',')) {
    std::size_t colon = tok.find(':');
    if (colon == std::string::npos)
      throw ConfigError("[analysis] pairs: expected i:j entries");
    int a = std::stoi(tok.substr(0, colon));
    int b = std::stoi(tok.substr(colon + 1));
    if (a < 0 || b < 0 || a >= p.prior.dimension() || b >= p.prior.dimension() || a == b)
      throw ConfigError("[analysis] pairs: component out of range");
    pairs.emplace_back(a, b);
  }
  if (pairs.empty()) throw ConfigError("[analysis] pairs: empty");
  return pairs;
}

Eigen::MatrixXd post_burn_pair(const Chain& chain, int a, int b) {
  Eigen::MatrixXd m(chain.length() - chain.burn_in, 2);
  m.col(0) = chain.component(a);
  m.col(1) = chain.component(b);
  return m;
}

StageReport stage_analyze(const ConfigFile& cfg, const Problem& p) {
  StageReport report;
  report.stage = "analyze";

  std::string chain_path =
      cfg.get_or("analysis", "chain",
                 out_path(cfg, cfg.get_or("sampler", "chain_name", "chain.tsv")));
  Chain chain = load_chain(chain_path);
  if (chain.samples.cols() != p.prior.dimension())
    throw ConfigError("analyze: chain dimension does not match the problem");

  bool have_ref = cfg.has("analysis", "reference_chain");
  Chain ref;
  if (have_ref) ref = load_chain(cfg.get("analysis", "reference_chain"));

  const int grid_n = cfg.get_int_or("analysis", "grid_n", 200);
  const int n_boot = cfg.get_int_or("analysis", "bootstrap", 20);
  std::uint64_t seed = master_seed(cfg) + kSeedAnalyze;

  std::ofstream kl_os;
  if (have_ref) {
    kl_os = open_out(out_path(cfg, "kl.tsv"));
    kl_os << "# i\tj\tkl\tse\n";
  }
  for (auto [a, b] : parse_pairs(cfg, p)) {
    Eigen::MatrixXd mc = post_burn_pair(chain, a, b);
    Eigen::MatrixXd mr = have_ref ? post_burn_pair(ref, a, b) : mc;
    Grid2D grid = joint_grid(mr, mc, grid_n);
    KDE2D kde_c = kde2(mc, grid);

    std::string kde_path = out_path(cfg, "kde_" + std::to_string(a) + "_" +
                                             std::to_string(b) + ".tsv");
    {
      std::ofstream os = open_out(kde_path);
      os << "# " << p.param_names[static_cast<std::size_t>(a)] << '\t'
         << p.param_names[static_cast<std::size_t>(b)] << "\tdensity\n";
      for (int i = 0; i < grid.nx(); ++i)
        for (int j = 0; j < grid.ny(); ++j)
          os << g17(grid.x[i]) << '\t' << g17(grid.y[j]) << '\t'
             << g17(kde_c.density(i, j)) << '\n';
    }
    report.outputs.push_back(kde_path);

    if (have_ref) {
      KLEstimate kl = kl_divergence_2d(mr, mc, grid, n_boot, seed);
      kl_os << a << '\t' << b << '\t' << g17(kl.value) << '\t'
            << g17(kl.standard_error) << '\n';
    }
  }
  if (have_ref) report.outputs.push_back(out_path(cfg, "kl.tsv"));

  if (p.name == "heat" && cfg.get_bool_or("analysis", "flux", true)) {
    auto* hm = dynamic_cast<const HeatModel*>(p.model.get());
    Eigen::VectorXd times = heat_measurement_times(hm->config());
    Eigen::MatrixXd coeffs = chain.samples.bottomRows(chain.length() - chain.burn_in);
    FluxMoments fm = flux_moments(coeffs, times, p.flux_period);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(fm.autocovariance);
    double lo = eig.eigenvalues().minCoeff(), hi = eig.eigenvalues().maxCoeff();
    if (lo < -1e-8 * hi)
      throw NumericalError("flux autocovariance is not positive semidefinite");

    std::string fm_path = out_path(cfg, "flux_moments.tsv");
    {
      std::ofstream os = open_out(fm_path);
      os << "# t\tmean\tvar\tskew\n";
      for (long i = 0; i < fm.times.size(); ++i)
        os << g17(fm.times[i]) << '\t' << g17(fm.mean[i]) << '\t'
           << g17(fm.variance[i]) << '\t' << g17(fm.skewness[i]) << '\n';
    }
    report.outputs.push_back(fm_path);

    std::string ac_path = out_path(cfg, "flux_autocovariance.tsv");
    {
      std::ofstream os = open_out(ac_path);
      os << "# autocovariance matrix, times as in flux_moments.tsv\n";
      for (long i = 0; i < fm.autocovariance.rows(); ++i) {
        for (long j = 0; j < fm.autocovariance.cols(); ++j)
          os << (j ? "\t" : "") << g17(fm.autocovariance(i, j));
        os << '\n';
      }
    }
    report.outputs.push_back(ac_path);
  }

  int acf_comp = cfg.get_int_or("analysis", "acf_component", p.name == "heat" ? 1 : 0);
  int max_lag = cfg.get_int_or("analysis", "acf_max_lag", 500);
  Eigen::VectorXd series = chain.component(acf_comp);
  max_lag = std::min<int>(max_lag, static_cast<int>(series.size()) - 1);
  Eigen::VectorXd rho = autocorrelation(series, max_lag);
  std::string acf_path = out_path(cfg, "acf.tsv");
  {
    std::ofstream os = open_out(acf_path);
    os << "# lag\trho (" << p.param_names[static_cast<std::size_t>(acf_comp)] << ")\n";
    for (int l = 0; l <= max_lag; ++l) os << l << '\t' << g17(rho[l]) << '\n';
  }
  report.outputs.push_back(acf_path);
  return report;
}

} // namespace

Problem build_problem(const ConfigFile& cfg) {
  Problem p;
  p.name = cfg.get("experiment", "problem");
  if (p.name == "source") {
    SourceModelConfig mc;
    mc.mesh_n = cfg.get_int_or("model", "mesh_n", mc.mesh_n);
    mc.dt = cfg.get_double_or("model", "dt", mc.dt);
    mc.strength = cfg.get_double_or("model", "strength", mc.strength);
    mc.width = cfg.get_double_or("model", "width", mc.width);
    mc.shutoff = cfg.get_double_or("model", "shutoff", mc.shutoff);
    p.model = std::make_shared<SourceModel>(mc);
    double lo = cfg.get_double_or("prior", "lo", 0.0);
    double hi = cfg.get_double_or("prior", "hi", 1.0);
    p.prior = Prior({Marginal::uniform(lo, hi), Marginal::uniform(lo, hi)});
    p.param_names = {"x1", "x2"};
    p.true_params = vector_entry(cfg, "data", "true_params", 2,
                                 Eigen::VectorXd::Constant(2, 0.25));
  } else if (p.name == "heat") {
    HeatModelConfig mc;
    mc.mesh_n = cfg.get_int_or("model", "mesh_n", mc.mesh_n);
    mc.dt = cfg.get_double_or("model", "dt", mc.dt);
    mc.n_modes = cfg.get_int_or("model", "n_modes", mc.n_modes);
    mc.n_times = cfg.get_int_or("model", "n_times", mc.n_times);
    mc.sensor_x = cfg.get_double_or("model", "sensor_x", mc.sensor_x);
    p.model = std::make_shared<HeatModel>(mc);
    p.flux_period = mc.horizon;
    const int dim = 2 * mc.n_modes + 1;
    double mean = cfg.get_double_or("prior", "mean", 0.0);
    double sd = cfg.get_double_or("prior", "stddev", std::sqrt(2.0));
    p.prior = Prior(std::vector<Marginal>(static_cast<std::size_t>(dim),
                                          Marginal::gaussian(mean, sd)));
    p.param_names.push_back("a0");
    for (int j = 1; j <= mc.n_modes; ++j) p.param_names.push_back("a" + std::to_string(j));
    for (int j = 1; j <= mc.n_modes; ++j) p.param_names.push_back("b" + std::to_string(j));
    Eigen::VectorXd truth = Eigen::VectorXd::Constant(dim, 1.5);
    truth[0] = 0.0;
    p.true_params = vector_entry(cfg, "data", "true_params", dim, truth);
  } else {
    throw ConfigError("[experiment] problem: expected source or heat");
  }
  if (p.true_params.size() != p.prior.dimension())
    throw ConfigError("[data] true_params: wrong dimension");
  return p;
}

std::shared_ptr<ForwardModel> build_fine_model(const ConfigFile& cfg, const Problem& p) {
  int f = cfg.get_int_or("data", "fine_factor", 2);
  if (f < 1) throw ConfigError("[data] fine_factor: must be >= 1");
  if (p.name == "source") {
    SourceModelConfig mc = dynamic_cast<const SourceModel&>(*p.model).config();
    mc.mesh_n = (mc.mesh_n - 1) * f + 1;
    mc.dt /= f;
    return std::make_shared<SourceModel>(mc);
  }
  HeatModelConfig mc = dynamic_cast<const HeatModel&>(*p.model).config();
  mc.mesh_n = (mc.mesh_n - 1) * f + 1;
  mc.dt /= f;
  return std::make_shared<HeatModel>(mc);
}

CEConfig make_ce_config(const ConfigFile& cfg, const Problem& p) {
  const int dim = p.prior.dimension();
  CEConfig ce;
  ce.elite_fraction = cfg.get_double_or("method", "elite_fraction", 0.05);
  ce.level = cfg.get_double_or("method", "gamma", 1e-3);
  ce.min_step = cfg.get_double_or("method", "min_step", 0.0);
  ce.min_step_divisor = cfg.get_double_or("method", "min_step_divisor", 10.0);
  ce.sample_size = cfg.get_int_or("method", "sample_size", 50000);
  ce.max_iterations = cfg.get_int_or("method", "max_iterations", 50);
  ce.surrogate_order = cfg.get_int_or("method", "order", 2);
  std::string grid = cfg.get_or("method", "grid", "smolyak");
  if (grid != "smolyak" && grid != "tensor")
    throw ConfigError("[method] grid: expected smolyak or tensor");
  ce.grid_kind = grid == "tensor" ? CEConfig::GridKind::Tensor : CEConfig::GridKind::Smolyak;
  ce.grid_level = cfg.get_int_or("method", "level", 3);
  ce.final_order = cfg.get_int_or("method", "final_order", -1);
  ce.final_grid_level = cfg.get_int_or("method", "final_level", -1);
  ce.extra_final_passes = cfg.get_int_or("method", "extra_final_passes", 0);
  ce.reuse_model_evaluations = cfg.get_bool_or("method", "reuse_evaluations", false);
  ce.seed = master_seed(cfg) + kSeedAdapt;

  Eigen::VectorXd mu0, sd0;
  if (p.name == "source") {
    mu0 = Eigen::VectorXd::Constant(dim, 0.5);
    sd0 = Eigen::VectorXd::Constant(dim, 0.05);
  } else {
    mu0 = p.prior.mean();
    sd0 = Eigen::VectorXd::Constant(dim, std::sqrt(0.5));
  }
  ce.initial = BiasingParams(vector_entry(cfg, "method", "initial_mean", dim, mu0),
                             vector_entry(cfg, "method", "initial_stddev", dim, sd0));
  return ce;
}

void write_data(const std::string& path, const Problem& p, const Eigen::VectorXd& values,
                const std::string& provenance) {
  if (values.size() != p.model->output_dim())
    throw ConfigError("write_data: value count does not match the model output");
  std::ofstream os = open_out(path);
  os << "# " << provenance << '\n';
  os << "# t\tsensor\tvalue\n";
  if (p.name == "source") {
    const auto& mc = dynamic_cast<const SourceModel&>(*p.model).config();
    const int nt = static_cast<int>(mc.measurement_times.size());
    for (long d = 0; d < values.size(); ++d)
      os << g17(mc.measurement_times[static_cast<std::size_t>(d % nt)]) << '\t' << d / nt
         << '\t' << g17(values[d]) << '\n';
  } else {
    Eigen::VectorXd times =
        heat_measurement_times(dynamic_cast<const HeatModel&>(*p.model).config());
    for (long d = 0; d < values.size(); ++d)
      os << g17(times[d]) << "\t0\t" << g17(values[d]) << '\n';
  }
}

Eigen::VectorXd load_data(const std::string& path, int expected_size) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open data file: " + path);
  std::vector<double> values;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    double t, v;
    int sensor;
    if (!(ls >> t >> sensor >> v))
      throw ConfigError("data file has a malformed row: " + path);
    values.push_back(v);
  }
  if (static_cast<int>(values.size()) != expected_size)
    throw ConfigError("data file " + path + ": expected " + std::to_string(expected_size) +
                      " rows, found " + std::to_string(values.size()));
  return to_vector(values);
}

void save_biasing(const std::string& path, const BiasingParams& v,
                  const std::vector<std::string>& names) {
  std::ofstream os = open_out(path);
  os << "# name\tmean\tstddev\n";
  for (int j = 0; j < v.dimension(); ++j)
    os << names[static_cast<std::size_t>(j)] << '\t' << g17(v.mean[j]) << '\t'
       << g17(v.stddev[j]) << '\n';
}

BiasingParams load_biasing(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open biasing file: " + path);
  std::vector<double> mu, sigma;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string name;
    double m, s;
    if (!(ls >> name >> m >> s))
      throw ConfigError("biasing file has a malformed row: " + path);
    mu.push_back(m);
    sigma.push_back(s);
  }
  if (mu.empty()) throw ConfigError("biasing file is empty: " + path);
  return BiasingParams(to_vector(mu), to_vector(sigma));
}

StageReport run_stage(const ConfigFile& cfg, const std::string& stage) {
  auto t0 = std::chrono::steady_clock::now();
  Problem p = build_problem(cfg);
  StageReport report;
  if (stage == "synthesize-data")
    report = stage_synthesize(cfg, p);
  else if (stage == "build-surrogate")
    report = stage_build_surrogate(cfg, p);
  else if (stage == "adapt")
    report = stage_adapt(cfg, p);
  else if (stage == "sample")
    report = stage_sample(cfg, p);
  else if (stage == "analyze")
    report = stage_analyze(cfg, p);
  else
    throw ConfigError("unknown stage: " + stage);
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_manifest(cfg, report);
  return report;
}

} // namespace apcs
