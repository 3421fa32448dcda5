#include "apcs/polynomials.hpp"

#include <cmath>
#include <set>

#include "apcs/errors.hpp"

namespace apcs {

namespace {

// Orthonormal recurrences, psi_{-1} = 0, psi_0 = 1.
//   Hermite (probabilist): psi_{k+1} = (x psi_k - sqrt(k) psi_{k-1}) / sqrt(k+1)
//   Legendre (uniform density on [-1,1]): build P_k with the classical
//   recurrence and scale by sqrt(2k+1), since E[P_k^2] = 1/(2k+1).
void recur(PolynomialFamily family, int max_degree, double x, double* out) {
  out[0] = 1.0;
  if (max_degree == 0) return;
  if (family == PolynomialFamily::HermiteProbabilist) {
    out[1] = x;
    for (int k = 1; k < max_degree; ++k)
      out[k + 1] = (x * out[k] - std::sqrt(double(k)) * out[k - 1]) / std::sqrt(double(k + 1));
  } else {
    double pm1 = 1.0, p = x;
    out[1] = std::sqrt(3.0) * x;
    for (int k = 1; k < max_degree; ++k) {
      double pp1 = ((2 * k + 1) * x * p - k * pm1) / (k + 1);
      pm1 = p;
      p = pp1;
      out[k + 1] = std::sqrt(double(2 * (k + 1) + 1)) * p;
    }
  }
}

} // namespace

double eval_univariate(PolynomialFamily family, int degree, double x) {
  if (degree < 0) throw ConfigError("polynomial degree must be non-negative");
  if (degree <= 1) return degree == 0 ? 1.0 : eval_univariate_all(family, 1, x)[1];
  Eigen::VectorXd v = eval_univariate_all(family, degree, x);
  return v[degree];
}

Eigen::VectorXd eval_univariate_all(PolynomialFamily family, int max_degree, double x) {
  if (max_degree < 0) throw ConfigError("polynomial degree must be non-negative");
  Eigen::VectorXd out(max_degree + 1);
  recur(family, max_degree, x, out.data());
  return out;
}

int multi_index_order(const MultiIndex& idx) {
  int s = 0;
  for (int e : idx) s += e;
  return s;
}

namespace {

void compositions(int dim, int total, MultiIndex& scratch, int pos,
                  std::vector<MultiIndex>& out) {
  if (pos == dim - 1) {
    scratch[pos] = total;
    out.push_back(scratch);
    return;
  }
  for (int v = total; v >= 0; --v) {
    scratch[pos] = v;
    compositions(dim, total - v, scratch, pos + 1, out);
  }
}

} // namespace

MultiIndexSet MultiIndexSet::total_order(int dimension, int max_order) {
  if (dimension < 1) throw ConfigError("multi-index dimension must be >= 1");
  if (max_order < 0) throw ConfigError("total order must be >= 0");
  MultiIndexSet set;
  set.dimension_ = dimension;
  set.max_order_ = max_order;
  MultiIndex scratch(dimension, 0);
  for (int n = 0; n <= max_order; ++n)
    compositions(dimension, n, scratch, 0, set.indices_);
  return set;
}

bool MultiIndexSet::is_admissible() const {
  std::set<MultiIndex> members(indices_.begin(), indices_.end());
  for (const MultiIndex& idx : indices_) {
    for (int j = 0; j < dimension_; ++j) {
      if (idx[j] == 0) continue;
      MultiIndex lower = idx;
      lower[j] -= 1;
      if (!members.count(lower)) return false;
    }
  }
  return true;
}

Eigen::VectorXd eval_multivariate(const MultiIndexSet& set,
                                  const std::vector<PolynomialFamily>& families,
                                  const Eigen::VectorXd& y) {
  const int dim = set.dimension();
  if (y.size() != dim || static_cast<int>(families.size()) != dim)
    throw ConfigError("eval_multivariate: dimension mismatch");

  // One univariate recurrence pass per dimension, then products.
  Eigen::MatrixXd uni(set.max_order() + 1, dim);
  for (int j = 0; j < dim; ++j)
    uni.col(j) = eval_univariate_all(families[j], set.max_order(), y[j]);

  Eigen::VectorXd out(set.size());
  for (std::size_t i = 0; i < set.size(); ++i) {
    double v = 1.0;
    const MultiIndex& idx = set[i];
    for (int j = 0; j < dim; ++j) v *= uni(idx[j], j);
    out[i] = v;
  }
  return out;
}

} // namespace apcs
