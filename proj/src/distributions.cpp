#include "apcs/distributions.hpp"

#include <cmath>
#include <limits>

#include "apcs/errors.hpp"

namespace apcs {

namespace {
constexpr double kLog2Pi = 1.8378770664093454835606594728112;
constexpr double kInf = std::numeric_limits<double>::infinity();
} // namespace

Marginal Marginal::gaussian(double mean, double stddev) {
  if (!(stddev > 0.0)) throw ConfigError("Gaussian marginal needs stddev > 0");
  return Marginal{Kind::Gaussian, mean, stddev};
}

Marginal Marginal::uniform(double a, double b) {
  if (!(a < b)) throw ConfigError("Uniform marginal needs a < b");
  return Marginal{Kind::Uniform, a, b};
}

InputDistribution::InputDistribution(std::vector<Marginal> marginals)
    : marginals_(std::move(marginals)) {
  if (marginals_.empty()) throw ConfigError("distribution needs at least one marginal");
}

PolynomialFamily InputDistribution::family(int j) const {
  return marginals_[j].kind == Marginal::Kind::Gaussian
             ? PolynomialFamily::HermiteProbabilist
             : PolynomialFamily::Legendre;
}

std::vector<PolynomialFamily> InputDistribution::families() const {
  std::vector<PolynomialFamily> f(marginals_.size());
  for (int j = 0; j < dimension(); ++j) f[j] = family(j);
  return f;
}

double InputDistribution::to_standard(int j, double y) const {
  const Marginal& m = marginals_[j];
  if (m.kind == Marginal::Kind::Gaussian) return (y - m.p1) / m.p2;
  return 2.0 * (y - m.p1) / (m.p2 - m.p1) - 1.0;
}

double InputDistribution::from_standard(int j, double z) const {
  const Marginal& m = marginals_[j];
  if (m.kind == Marginal::Kind::Gaussian) return m.p1 + m.p2 * z;
  return m.p1 + 0.5 * (z + 1.0) * (m.p2 - m.p1);
}

Eigen::VectorXd InputDistribution::to_standard(const Eigen::VectorXd& y) const {
  Eigen::VectorXd z(dimension());
  for (int j = 0; j < dimension(); ++j) z[j] = to_standard(j, y[j]);
  return z;
}

Eigen::VectorXd InputDistribution::from_standard(const Eigen::VectorXd& z) const {
  Eigen::VectorXd y(dimension());
  for (int j = 0; j < dimension(); ++j) y[j] = from_standard(j, z[j]);
  return y;
}

bool InputDistribution::in_support(const Eigen::VectorXd& y) const {
  for (int j = 0; j < dimension(); ++j) {
    const Marginal& m = marginals_[j];
    if (m.kind == Marginal::Kind::Uniform && (y[j] < m.p1 || y[j] > m.p2)) return false;
  }
  return true;
}

double InputDistribution::log_density(const Eigen::VectorXd& y) const {
  double lp = 0.0;
  for (int j = 0; j < dimension(); ++j) {
    const Marginal& m = marginals_[j];
    if (m.kind == Marginal::Kind::Gaussian) {
      double z = (y[j] - m.p1) / m.p2;
      lp += -0.5 * z * z - std::log(m.p2) - 0.5 * kLog2Pi;
    } else {
      if (y[j] < m.p1 || y[j] > m.p2) return -kInf;
      lp += -std::log(m.p2 - m.p1);
    }
  }
  return lp;
}

Eigen::VectorXd InputDistribution::sample(Rng& rng) const {
  Eigen::VectorXd y(dimension());
  for (int j = 0; j < dimension(); ++j) {
    const Marginal& m = marginals_[j];
    y[j] = m.kind == Marginal::Kind::Gaussian ? m.p1 + m.p2 * rng.normal()
                                              : rng.uniform(m.p1, m.p2);
  }
  return y;
}

Eigen::VectorXd InputDistribution::mean() const {
  Eigen::VectorXd mu(dimension());
  for (int j = 0; j < dimension(); ++j) {
    const Marginal& m = marginals_[j];
    mu[j] = m.kind == Marginal::Kind::Gaussian ? m.p1 : 0.5 * (m.p1 + m.p2);
  }
  return mu;
}

} // namespace apcs
