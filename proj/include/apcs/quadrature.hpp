#ifndef APCS_QUADRATURE_HPP
#define APCS_QUADRATURE_HPP

#include <iosfwd>
#include <vector>

#include <Eigen/Core>

#include "apcs/polynomials.hpp"

namespace apcs {

// One-dimensional rule, probability normalized: weights sum to 1 and the
// rule integrates against the associated weight density (standard normal
// for Hermite, uniform density 1/2 on [-1,1] for Legendre/Clenshaw-Curtis).
struct Rule1D {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};

enum class Rule1DKind { GaussHermite, GaussLegendre, ClenshawCurtis };

// Gauss rule via Golub-Welsch on the Jacobi matrix of the family; exact for
// polynomials of degree <= 2 n_points - 1.
Rule1D gauss_rule(PolynomialFamily family, int n_points);

// Nested Clenshaw-Curtis rule on [-1,1] against the uniform density.
Rule1D clenshaw_curtis_rule(int n_points);

// 1D node count at a given level: linear growth for Gauss rules,
// 2^(level-1)+1 for Clenshaw-Curtis (1 point at level 1).
int level_points(Rule1DKind kind, int level);

Rule1D rule_at_level(Rule1DKind kind, int level);

// Multi-dimensional rule: nodes are rows.
struct QuadratureRule {
  Eigen::MatrixXd nodes;   // n_nodes x dimension
  Eigen::VectorXd weights; // n_nodes

  int size() const { return static_cast<int>(weights.size()); }
  int dimension() const { return static_cast<int>(nodes.cols()); }
};

// Full Cartesian product; weights multiply. First dimension varies slowest.
QuadratureRule tensor_rule(const std::vector<Rule1D>& per_dim);

struct SparseGridSpec {
  int dimension = 1;
  int level = 1;
  Rule1DKind kind = Rule1DKind::GaussHermite;
};

// Smolyak combination with standard coefficients; duplicate nodes (within
// 1e-12 per coordinate) merged with summed weights, ordering deterministic.
QuadratureRule smolyak_rule(const SparseGridSpec& spec);

// Rows "w x_1 ... x_n" at 17 significant digits.
void write_rule(std::ostream& os, const QuadratureRule& rule);

} // namespace apcs

#endif
