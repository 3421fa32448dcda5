#include "apcs/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>

#include <Eigen/Dense>

#include "apcs/errors.hpp"

namespace apcs {

namespace {

constexpr double kMergeTol = 1e-12;

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r *= double(n - k + i) / double(i);
  return r;
}

} // namespace

Rule1D gauss_rule(PolynomialFamily family, int n_points) {
  if (n_points < 1) throw ConfigError("gauss_rule: need at least one point");
  Rule1D rule;
  if (n_points == 1) {
    rule.nodes = Eigen::VectorXd::Zero(1);
    rule.weights = Eigen::VectorXd::Ones(1);
    return rule;
  }
  // Jacobi matrix of the monic recurrence; nodes are its eigenvalues and
  // weights the squared first eigenvector components (density normalized).
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n_points, n_points);
  for (int k = 1; k < n_points; ++k) {
    double b = family == PolynomialFamily::HermiteProbabilist
                   ? std::sqrt(double(k))
                   : double(k) / std::sqrt(4.0 * k * k - 1.0);
    J(k, k - 1) = J(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  rule.nodes = es.eigenvalues();
  rule.weights = es.eigenvectors().row(0).transpose().array().square();
  rule.weights /= rule.weights.sum();
  return rule;
}

Rule1D clenshaw_curtis_rule(int n_points) {
  if (n_points < 1) throw ConfigError("clenshaw_curtis_rule: need at least one point");
  Rule1D rule;
  if (n_points == 1) {
    rule.nodes = Eigen::VectorXd::Zero(1);
    rule.weights = Eigen::VectorXd::Ones(1);
    return rule;
  }
  const int m = n_points - 1;
  rule.nodes.resize(n_points);
  for (int j = 0; j <= m; ++j)
    rule.nodes[j] = -std::cos(M_PI * double(j) / double(m)); // ascending

  // Weights from exactness on the Chebyshev basis: T_k(x_j) w_j = moments,
  // with moments of the uniform density 1/(1-k^2) for even k, 0 for odd.
  Eigen::MatrixXd V(n_points, n_points);
  for (int j = 0; j < n_points; ++j) {
    double theta = std::acos(std::clamp(rule.nodes[j], -1.0, 1.0));
    for (int k = 0; k < n_points; ++k) V(k, j) = std::cos(k * theta);
  }
  Eigen::VectorXd mom = Eigen::VectorXd::Zero(n_points);
  for (int k = 0; k < n_points; k += 2) mom[k] = 1.0 / (1.0 - double(k) * double(k));
  rule.weights = V.fullPivLu().solve(mom);
  rule.weights /= rule.weights.sum();
  return rule;
}

int level_points(Rule1DKind kind, int level) {
  if (level < 1) throw ConfigError("quadrature level must be >= 1");
  if (kind == Rule1DKind::ClenshawCurtis)
    return level == 1 ? 1 : (1 << (level - 1)) + 1;
  return level;
}

Rule1D rule_at_level(Rule1DKind kind, int level) {
  const int n = level_points(kind, level);
  switch (kind) {
    case Rule1DKind::GaussHermite:
      return gauss_rule(PolynomialFamily::HermiteProbabilist, n);
    case Rule1DKind::GaussLegendre:
      return gauss_rule(PolynomialFamily::Legendre, n);
    case Rule1DKind::ClenshawCurtis:
      return clenshaw_curtis_rule(n);
  }
  throw ConfigError("unknown 1D rule kind");
}

QuadratureRule tensor_rule(const std::vector<Rule1D>& per_dim) {
  if (per_dim.empty()) throw ConfigError("tensor_rule: need at least one dimension");
  const int dim = static_cast<int>(per_dim.size());
  long total = 1;
  for (const Rule1D& r : per_dim) total *= r.nodes.size();

  QuadratureRule rule;
  rule.nodes.resize(total, dim);
  rule.weights.resize(total);
  std::vector<int> idx(dim, 0);
  for (long m = 0; m < total; ++m) {
    double w = 1.0;
    for (int j = 0; j < dim; ++j) {
      rule.nodes(m, j) = per_dim[j].nodes[idx[j]];
      w *= per_dim[j].weights[idx[j]];
    }
    rule.weights[m] = w;
    for (int j = dim - 1; j >= 0; --j) { // last dimension fastest
      if (++idx[j] < per_dim[j].nodes.size()) break;
      idx[j] = 0;
    }
  }
  return rule;
}

namespace {

void level_combinations(int dim, int remaining, int pos, std::vector<int>& scratch,
                        std::vector<std::vector<int>>& out) {
  if (pos == dim - 1) {
    if (remaining >= 1) {
      scratch[pos] = remaining;
      out.push_back(scratch);
    }
    return;
  }
  for (int v = remaining - (dim - 1 - pos); v >= 1; --v) {
    scratch[pos] = v;
    level_combinations(dim, remaining - v, pos + 1, scratch, out);
  }
}

// Lexicographic row order with a per-coordinate tolerance, plus adjacent-merge.
QuadratureRule merge_nodes(const Eigen::MatrixXd& nodes, const Eigen::VectorXd& weights) {
  const long n = nodes.rows();
  const int dim = static_cast<int>(nodes.cols());
  std::vector<long> order(n);
  std::iota(order.begin(), order.end(), 0);
  auto cmp_dim = [&](long a, long b, int j) {
    double d = nodes(a, j) - nodes(b, j);
    if (d < -kMergeTol) return -1;
    if (d > kMergeTol) return 1;
    return 0;
  };
  std::sort(order.begin(), order.end(), [&](long a, long b) {
    for (int j = 0; j < dim; ++j) {
      int c = cmp_dim(a, b, j);
      if (c != 0) return c < 0;
    }
    return false;
  });

  std::vector<long> rep;
  std::vector<double> wsum;
  for (long k = 0; k < n; ++k) {
    long i = order[k];
    bool merged = false;
    if (!rep.empty()) {
      long r = rep.back();
      merged = true;
      for (int j = 0; j < dim; ++j)
        if (cmp_dim(i, r, j) != 0) { merged = false; break; }
    }
    if (merged)
      wsum.back() += weights[i];
    else {
      rep.push_back(i);
      wsum.push_back(weights[i]);
    }
  }

  QuadratureRule out;
  out.nodes.resize(static_cast<long>(rep.size()), dim);
  out.weights.resize(static_cast<long>(rep.size()));
  for (std::size_t k = 0; k < rep.size(); ++k) {
    out.nodes.row(static_cast<long>(k)) = nodes.row(rep[k]);
    out.weights[static_cast<long>(k)] = wsum[k];
  }
  return out;
}

} // namespace

QuadratureRule smolyak_rule(const SparseGridSpec& spec) {
  if (spec.dimension < 1) throw ConfigError("smolyak_rule: dimension must be >= 1");
  if (spec.level < 1) throw ConfigError("smolyak_rule: level must be >= 1");
  const int n = spec.dimension;
  const int q = spec.level + n - 1;

  // Q_S = sum over |l| in [q-n+1, q] of (-1)^(q-|l|) C(n-1, q-|l|) (Q_l1 x ... x Q_ln)
  std::vector<std::vector<int>> combos;
  std::vector<int> scratch(n);
  for (int total = std::max(n, q - n + 1); total <= q; ++total)
    level_combinations(n, total, 0, scratch, combos);

  std::vector<Rule1D> cache(spec.level + 1);
  for (int l = 1; l <= spec.level; ++l) cache[l] = rule_at_level(spec.kind, l);

  long raw_count = 0;
  std::vector<QuadratureRule> pieces;
  pieces.reserve(combos.size());
  for (const std::vector<int>& levels : combos) {
    int total = std::accumulate(levels.begin(), levels.end(), 0);
    double coeff = ((q - total) % 2 ? -1.0 : 1.0) * binomial(n - 1, q - total);
    std::vector<Rule1D> per_dim(n);
    for (int j = 0; j < n; ++j) per_dim[j] = cache[levels[j]];
    QuadratureRule t = tensor_rule(per_dim);
    t.weights *= coeff;
    raw_count += t.size();
    pieces.push_back(std::move(t));
  }

  Eigen::MatrixXd nodes(raw_count, n);
  Eigen::VectorXd weights(raw_count);
  long at = 0;
  for (const QuadratureRule& t : pieces) {
    nodes.middleRows(at, t.size()) = t.nodes;
    weights.segment(at, t.size()) = t.weights;
    at += t.size();
  }
  return merge_nodes(nodes, weights);
}

void write_rule(std::ostream& os, const QuadratureRule& rule) {
  char buf[32];
  for (int m = 0; m < rule.size(); ++m) {
    std::snprintf(buf, sizeof buf, "%.17g", rule.weights[m]);
    os << buf;
    for (int j = 0; j < rule.dimension(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", rule.nodes(m, j));
      os << '\t' << buf;
    }
    os << '\n';
  }
}

} // namespace apcs
