#ifndef APCS_POLYNOMIALS_HPP
#define APCS_POLYNOMIALS_HPP

#include <vector>

#include <Eigen/Core>

namespace apcs {

// Orthonormal univariate polynomial families, each tied to a probability
// weight density: probabilists' Hermite (standard normal) and Legendre
// (uniform on [-1,1]). psi_0 == 1 and E[psi_i psi_j] = delta_ij under the
// family's density.
enum class PolynomialFamily { HermiteProbabilist, Legendre };

// Orthonormal psi_degree(x) by three-term recurrence.
double eval_univariate(PolynomialFamily family, int degree, double x);

// psi_0(x) .. psi_max_degree(x) in one recurrence pass.
Eigen::VectorXd eval_univariate_all(PolynomialFamily family, int max_degree, double x);

// Exponent tuple (i_1, ..., i_n) of one tensor-product basis term.
using MultiIndex = std::vector<int>;

int multi_index_order(const MultiIndex& idx);

// Ordered collection of multi-indices defining a multivariate basis.
// Construction is total-order (|i| <= N) in graded lexicographic order:
// ascending total order, first component varying slowest within a grade.
class MultiIndexSet {
public:
  static MultiIndexSet total_order(int dimension, int max_order);

  int dimension() const { return dimension_; }
  int max_order() const { return max_order_; }
  std::size_t size() const { return indices_.size(); }
  const MultiIndex& operator[](std::size_t i) const { return indices_[i]; }
  const std::vector<MultiIndex>& indices() const { return indices_; }

  // Downward-closed: every component-wise smaller index of a member is a member.
  bool is_admissible() const;

private:
  MultiIndexSet() = default;
  std::vector<MultiIndex> indices_;
  int dimension_ = 0;
  int max_order_ = 0;
};

// Psi_i(y) = prod_j psi_{i_j}(y_j) for every member of the set.
Eigen::VectorXd eval_multivariate(const MultiIndexSet& set,
                                  const std::vector<PolynomialFamily>& families,
                                  const Eigen::VectorXd& y);

} // namespace apcs

#endif
