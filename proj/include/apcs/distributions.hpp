#ifndef APCS_DISTRIBUTIONS_HPP
#define APCS_DISTRIBUTIONS_HPP

#include <vector>

#include <Eigen/Core>

#include "apcs/polynomials.hpp"
#include "apcs/rng.hpp"

namespace apcs {

// One independent marginal. Gaussian carries (mean, stddev); Uniform carries
// the interval endpoints (a, b).
struct Marginal {
  enum class Kind { Gaussian, Uniform };
  Kind kind = Kind::Gaussian;
  double p1 = 0.0; // mean / a
  double p2 = 1.0; // stddev / b

  static Marginal gaussian(double mean, double stddev);
  static Marginal uniform(double a, double b);
};

// Product distribution with independent marginals. Serves both as a prior
// and as the input measure of a PC surrogate; the standardized coordinate z
// is standard normal (Gaussian marginal) or uniform on [-1,1] (Uniform
// marginal), matching the polynomial family used per dimension.
class InputDistribution {
public:
  InputDistribution() = default;
  explicit InputDistribution(std::vector<Marginal> marginals);

  int dimension() const { return static_cast<int>(marginals_.size()); }
  const Marginal& marginal(int j) const { return marginals_[j]; }
  PolynomialFamily family(int j) const;
  std::vector<PolynomialFamily> families() const;

  double to_standard(int j, double y) const;
  double from_standard(int j, double z) const;
  Eigen::VectorXd to_standard(const Eigen::VectorXd& y) const;
  Eigen::VectorXd from_standard(const Eigen::VectorXd& z) const;

  bool in_support(const Eigen::VectorXd& y) const;
  // -infinity outside the support.
  double log_density(const Eigen::VectorXd& y) const;
  Eigen::VectorXd sample(Rng& rng) const;
  Eigen::VectorXd mean() const;

private:
  std::vector<Marginal> marginals_;
};

// A prior is structurally the same object: independent marginals with
// support-aware log-density.
using Prior = InputDistribution;

} // namespace apcs

#endif
