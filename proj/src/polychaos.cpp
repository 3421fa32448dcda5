#include "apcs/polychaos.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "apcs/errors.hpp"

namespace apcs {

Eigen::VectorXd ForwardModel::evaluate(const Eigen::VectorXd& y) const {
  if (y.size() != input_dim())
    throw ConfigError("forward model: expected " + std::to_string(input_dim()) +
                      " inputs, got " + std::to_string(y.size()));
  count_.fetch_add(1, std::memory_order_relaxed);
  return eval_impl(y);
}

PCSurrogate::PCSurrogate(InputDistribution dist, MultiIndexSet indices,
                         Eigen::MatrixXd coefficients)
    : dist_(std::move(dist)), indices_(std::move(indices)),
      coefficients_(std::move(coefficients)) {
  if (coefficients_.cols() != static_cast<long>(indices_.size()) ||
      indices_.dimension() != dist_.dimension())
    throw ConfigError("PCSurrogate: inconsistent coefficient/index/distribution shapes");
}

PCSurrogate PCSurrogate::project(const ForwardModel& model, const InputDistribution& dist,
                                 const MultiIndexSet& index_set, const QuadratureRule& rule) {
  if (model.input_dim() != dist.dimension() || rule.dimension() != dist.dimension())
    throw ConfigError("project: dimension mismatch between model, distribution and rule");

  const std::vector<PolynomialFamily> families = dist.families();
  Eigen::MatrixXd coeffs =
      Eigen::MatrixXd::Zero(model.output_dim(), static_cast<long>(index_set.size()));
  for (int m = 0; m < rule.size(); ++m) {
    Eigen::VectorXd z = rule.nodes.row(m).transpose();
    Eigen::VectorXd y = dist.from_standard(z);
    Eigen::VectorXd g;
    try {
      g = model.evaluate(y);
    } catch (const std::exception& e) {
      std::ostringstream os;
      os << "model evaluation failed at quadrature node (";
      for (int j = 0; j < y.size(); ++j) os << (j ? ", " : "") << y[j];
      os << "): " << e.what();
      throw NumericalError(os.str());
    }
    Eigen::VectorXd basis = eval_multivariate(index_set, families, z);
    coeffs.noalias() += rule.weights[m] * g * basis.transpose();
  }

  PCSurrogate s(dist, index_set, std::move(coeffs));
  s.build_evaluations_ = rule.size();
  return s;
}

Eigen::VectorXd PCSurrogate::eval_impl(const Eigen::VectorXd& y) const {
  Eigen::VectorXd z = dist_.to_standard(y);
  Eigen::VectorXd basis = eval_multivariate(indices_, dist_.families(), z);
  return coefficients_ * basis;
}

namespace {
std::string g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
} // namespace

void PCSurrogate::save(std::ostream& os) const {
  os << "# apcs surrogate v1\n";
  os << dist_.dimension() << '\t' << output_dim() << '\t' << indices_.max_order() << '\t'
     << indices_.size() << '\n';
  for (int j = 0; j < dist_.dimension(); ++j) {
    const Marginal& m = dist_.marginal(j);
    os << (m.kind == Marginal::Kind::Gaussian ? "gaussian" : "uniform") << '\t'
       << g17(m.p1) << '\t' << g17(m.p2) << '\n';
  }
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    for (int e : indices_[i]) os << e << '\t';
    for (int d = 0; d < output_dim(); ++d)
      os << g17(coefficients_(d, static_cast<long>(i))) << (d + 1 < output_dim() ? "\t" : "");
    os << '\n';
  }
}

void PCSurrogate::save_file(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot open surrogate file for writing: " + path);
  save(os);
}

PCSurrogate PCSurrogate::load(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("# apcs surrogate", 0) != 0)
    throw ConfigError("not a surrogate file (bad header)");
  int ny = 0, nd = 0, order = 0;
  std::size_t n_terms = 0;
  is >> ny >> nd >> order >> n_terms;
  if (!is || ny < 1 || nd < 1 || order < 0)
    throw ConfigError("surrogate file: malformed dimension line");

  std::vector<Marginal> marginals;
  for (int j = 0; j < ny; ++j) {
    std::string kind;
    double p1 = 0, p2 = 0;
    is >> kind >> p1 >> p2;
    if (!is) throw ConfigError("surrogate file: malformed marginal line");
    marginals.push_back(kind == "gaussian" ? Marginal::gaussian(p1, p2)
                                           : Marginal::uniform(p1, p2));
  }

  MultiIndexSet set = MultiIndexSet::total_order(ny, order);
  if (set.size() != n_terms)
    throw ConfigError("surrogate file: term count does not match total-order set");
  Eigen::MatrixXd coeffs(nd, static_cast<long>(n_terms));
  for (std::size_t i = 0; i < n_terms; ++i) {
    for (int j = 0; j < ny; ++j) {
      int e = -1;
      is >> e;
      if (!is || e != set[i][j])
        throw ConfigError("surrogate file: multi-index mismatch at row " + std::to_string(i));
    }
    for (int d = 0; d < nd; ++d) is >> coeffs(d, static_cast<long>(i));
    if (!is) throw ConfigError("surrogate file: malformed coefficient row");
  }
  return PCSurrogate(InputDistribution(std::move(marginals)), std::move(set), std::move(coeffs));
}

PCSurrogate PCSurrogate::load_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open surrogate file: " + path);
  return load(is);
}

std::size_t MemoizedModel::cache_size() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return cache_.size();
}

Eigen::VectorXd MemoizedModel::eval_impl(const Eigen::VectorXd& y) const {
  std::vector<double> key(y.data(), y.data() + y.size());
  {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }
  Eigen::VectorXd value = inner_.evaluate(y);
  std::lock_guard<std::mutex> lock(mutex_);
  return cache_.emplace(std::move(key), std::move(value)).first->second;
}

L2ErrorEstimate l2_error(const PCSurrogate& surrogate, const ForwardModel& model,
                         const InputDistribution& dist, int n_mc, std::uint64_t seed) {
  if (n_mc < 1) throw ConfigError("l2_error: n_mc must be >= 1");
  Rng rng(seed);
  Eigen::VectorXd sq = Eigen::VectorXd::Zero(model.output_dim());
  double total = 0.0, total2 = 0.0;
  for (int m = 0; m < n_mc; ++m) {
    Eigen::VectorXd y = dist.sample(rng);
    Eigen::VectorXd diff = model.evaluate(y) - surrogate.evaluate(y);
    Eigen::VectorXd d2 = diff.array().square();
    sq += d2;
    double s = d2.sum();
    total += s;
    total2 += s * s;
  }
  L2ErrorEstimate est;
  est.per_output = (sq / n_mc).array().sqrt();
  double mean = total / n_mc;
  est.aggregate = std::sqrt(mean);
  double var = std::max(0.0, total2 / n_mc - mean * mean);
  // Delta method on sqrt of the mean squared error.
  est.aggregate_standard_error =
      mean > 0 ? 0.5 * std::sqrt(var / n_mc) / std::sqrt(mean) : 0.0;
  return est;
}

} // namespace apcs
