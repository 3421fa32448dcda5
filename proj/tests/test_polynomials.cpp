#include <doctest.h>

#include <cmath>
#include <vector>

#include "apcs/polynomials.hpp"
#include "apcs/quadrature.hpp"
#include "apcs/rng.hpp"

using namespace apcs;

namespace {

// Monomial-coefficient oracle: builds the orthonormal polynomials by running
// the recurrences on coefficient vectors instead of point values, then
// evaluates by Horner. Independent of eval_univariate's arithmetic order.
std::vector<std::vector<double>> monomial_table(PolynomialFamily family, int max_degree) {
  std::vector<std::vector<double>> c(static_cast<std::size_t>(max_degree) + 1);
  c[0] = {family == PolynomialFamily::Legendre ? 1.0 : 1.0};
  if (max_degree == 0) return c;
  if (family == PolynomialFamily::HermiteProbabilist) {
    c[1] = {0.0, 1.0};
    for (int k = 1; k < max_degree; ++k) {
      // h_{k+1} = (x h_k - sqrt(k) h_{k-1}) / sqrt(k+1)
      std::vector<double> next(static_cast<std::size_t>(k) + 2, 0.0);
      for (std::size_t j = 0; j < c[k].size(); ++j) next[j + 1] += c[k][j];
      for (std::size_t j = 0; j < c[k - 1].size(); ++j)
        next[j] -= std::sqrt(double(k)) * c[k - 1][j];
      for (double& v : next) v /= std::sqrt(double(k) + 1.0);
      c[static_cast<std::size_t>(k) + 1] = next;
    }
  } else {
    // Monic-free classical Legendre P_k then scale by sqrt(2k+1).
    std::vector<std::vector<double>> p(static_cast<std::size_t>(max_degree) + 1);
    p[0] = {1.0};
    p[1] = {0.0, 1.0};
    for (int k = 1; k < max_degree; ++k) {
      std::vector<double> next(static_cast<std::size_t>(k) + 2, 0.0);
      for (std::size_t j = 0; j < p[k].size(); ++j)
        next[j + 1] += (2.0 * k + 1.0) / (k + 1.0) * p[k][j];
      for (std::size_t j = 0; j < p[k - 1].size(); ++j)
        next[j] -= double(k) / (k + 1.0) * p[k - 1][j];
      p[static_cast<std::size_t>(k) + 1] = next;
    }
    for (int k = 0; k <= max_degree; ++k) {
      c[k] = p[k];
      for (double& v : c[k]) v *= std::sqrt(2.0 * k + 1.0);
    }
  }
  return c;
}

double horner(const std::vector<double>& coeffs, double x) {
  double acc = 0.0;
  for (std::size_t j = coeffs.size(); j-- > 0;) acc = acc * x + coeffs[j];
  return acc;
}

} // namespace

TEST_SUITE("polynomials") {

TEST_CASE("degree zero is one everywhere") {
  CHECK(eval_univariate(PolynomialFamily::HermiteProbabilist, 0, 3.7) == 1.0);
  CHECK(eval_univariate(PolynomialFamily::Legendre, 0, -0.9) == 1.0);
}

TEST_CASE("low-degree values match symbolic forms") {
  // (x^2 - 1)/sqrt(2) at x = 0
  CHECK(eval_univariate(PolynomialFamily::HermiteProbabilist, 2, 0.0) ==
        doctest::Approx(-1.0 / std::sqrt(2.0)).epsilon(1e-12));
  // sqrt(3) x at x = 0.5
  CHECK(eval_univariate(PolynomialFamily::Legendre, 1, 0.5) ==
        doctest::Approx(std::sqrt(3.0) * 0.5).epsilon(1e-12));
}

TEST_CASE("recurrence matches monomial-expansion oracle") {
  for (PolynomialFamily family :
       {PolynomialFamily::HermiteProbabilist, PolynomialFamily::Legendre}) {
    auto table = monomial_table(family, 10);
    double lo = family == PolynomialFamily::Legendre ? -1.0 : -4.0;
    double hi = -lo;
    for (double x = lo; x <= hi; x += (hi - lo) / 16.0) {
      for (int k = 0; k <= 10; ++k) {
        double expect = horner(table[static_cast<std::size_t>(k)], x);
        double got = eval_univariate(family, k, x);
        CHECK(got == doctest::Approx(expect).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("orthonormality Gram matrix is the identity") {
  for (PolynomialFamily family :
       {PolynomialFamily::HermiteProbabilist, PolynomialFamily::Legendre}) {
    Rule1D rule = gauss_rule(family, 64);
    for (int i = 0; i <= 10; ++i)
      for (int j = 0; j <= 10; ++j) {
        double acc = 0.0;
        for (long m = 0; m < rule.nodes.size(); ++m)
          acc += rule.weights[m] * eval_univariate(family, i, rule.nodes[m]) *
                 eval_univariate(family, j, rule.nodes[m]);
        CHECK(std::abs(acc - (i == j ? 1.0 : 0.0)) < 1e-10);
      }
  }
}

TEST_CASE("total-order sets enumerate in graded lexicographic order") {
  MultiIndexSet s1 = MultiIndexSet::total_order(1, 4);
  REQUIRE(s1.size() == 5);
  for (int k = 0; k <= 4; ++k) CHECK(s1[static_cast<std::size_t>(k)][0] == k);

  MultiIndexSet s2 = MultiIndexSet::total_order(2, 1);
  REQUIRE(s2.size() == 3);
  CHECK(s2[0] == MultiIndex{0, 0});
  CHECK(s2[1] == MultiIndex{1, 0});
  CHECK(s2[2] == MultiIndex{0, 1});

  // C(11, 2) = 55
  CHECK(MultiIndexSet::total_order(9, 2).size() == 55);
  CHECK(MultiIndexSet::total_order(2, 2).size() == 6);
}

TEST_CASE("total-order sets are admissible and ordered by grade") {
  MultiIndexSet set = MultiIndexSet::total_order(3, 4);
  CHECK(set.is_admissible());
  for (std::size_t i = 1; i < set.size(); ++i)
    CHECK(multi_index_order(set[i - 1]) <= multi_index_order(set[i]));
}

TEST_CASE("multivariate evaluation is the product of univariate values") {
  MultiIndexSet set = MultiIndexSet::total_order(3, 4);
  std::vector<PolynomialFamily> fams = {PolynomialFamily::HermiteProbabilist,
                                        PolynomialFamily::Legendre,
                                        PolynomialFamily::HermiteProbabilist};
  Rng rng(7);
  for (int rep = 0; rep < 20; ++rep) {
    Eigen::VectorXd y(3);
    y << rng.uniform(-2, 2), rng.uniform(-1, 1), rng.uniform(-2, 2);
    Eigen::VectorXd vals = eval_multivariate(set, fams, y);
    REQUIRE(vals.size() == static_cast<long>(set.size()));
    for (std::size_t i = 0; i < set.size(); ++i) {
      double prod = 1.0;
      for (int j = 0; j < 3; ++j)
        prod *= eval_univariate(fams[static_cast<std::size_t>(j)], set[i][j], y[j]);
      CHECK(vals[static_cast<long>(i)] == doctest::Approx(prod).epsilon(1e-13));
    }
  }
}

TEST_CASE("order zero basis and simple Hermite product") {
  MultiIndexSet set0 = MultiIndexSet::total_order(2, 0);
  std::vector<PolynomialFamily> fams(2, PolynomialFamily::HermiteProbabilist);
  Eigen::VectorXd y(2);
  y << 0.3, -1.2;
  Eigen::VectorXd v0 = eval_multivariate(set0, fams, y);
  REQUIRE(v0.size() == 1);
  CHECK(v0[0] == 1.0);

  // psi_1(x) = x, so the (1,1) term at (1,1) is exactly 1.
  MultiIndexSet set2 = MultiIndexSet::total_order(2, 2);
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(2);
  Eigen::VectorXd v2 = eval_multivariate(set2, fams, ones);
  for (std::size_t i = 0; i < set2.size(); ++i)
    if (set2[i] == MultiIndex{1, 1})
      CHECK(v2[static_cast<long>(i)] == doctest::Approx(1.0).epsilon(1e-14));
}

} // TEST_SUITE
