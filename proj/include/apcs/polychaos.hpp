#ifndef APCS_POLYCHAOS_HPP
#define APCS_POLYCHAOS_HPP

#include <atomic>
#include <iosfwd>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "apcs/distributions.hpp"
#include "apcs/polynomials.hpp"
#include "apcs/quadrature.hpp"

namespace apcs {

// Deterministic parameter-to-observable map. evaluate() counts calls; the
// counter is atomic so concurrent evaluation of distinct points is safe.
class ForwardModel {
public:
  ForwardModel() = default;
  // Copies and moves start with a fresh evaluation counter.
  ForwardModel(const ForwardModel&) {}
  ForwardModel& operator=(const ForwardModel&) { return *this; }
  virtual ~ForwardModel() = default;
  virtual int input_dim() const = 0;
  virtual int output_dim() const = 0;

  Eigen::VectorXd evaluate(const Eigen::VectorXd& y) const;

  long evaluation_count() const { return count_.load(); }
  void reset_evaluation_count() const { count_.store(0); }

protected:
  virtual Eigen::VectorXd eval_impl(const Eigen::VectorXd& y) const = 0;

private:
  mutable std::atomic<long> count_{0};
};

// Truncated polynomial chaos expansion of a vector-valued model, built over
// an input distribution. Coefficients are stored against the standardized
// coordinates of that distribution, so the basis stays orthonormal for any
// (mu, sigma) of a Gaussian biasing distribution.
class PCSurrogate final : public ForwardModel {
public:
  // Non-intrusive projection: rule nodes are in standardized coordinates,
  // the model is evaluated at the corresponding physical points, and each
  // coefficient is the quadrature estimate of E[g Psi_i].
  static PCSurrogate project(const ForwardModel& model, const InputDistribution& dist,
                             const MultiIndexSet& index_set, const QuadratureRule& rule);

  int input_dim() const override { return dist_.dimension(); }
  int output_dim() const override { return static_cast<int>(coefficients_.rows()); }

  const MultiIndexSet& index_set() const { return indices_; }
  const Eigen::MatrixXd& coefficients() const { return coefficients_; } // n_d x n_terms
  const InputDistribution& input_distribution() const { return dist_; }
  // Model evaluations spent building this surrogate.
  long build_evaluations() const { return build_evaluations_; }

  void save(std::ostream& os) const;
  void save_file(const std::string& path) const;
  static PCSurrogate load(std::istream& is);
  static PCSurrogate load_file(const std::string& path);

  PCSurrogate(InputDistribution dist, MultiIndexSet indices, Eigen::MatrixXd coefficients);

protected:
  Eigen::VectorXd eval_impl(const Eigen::VectorXd& y) const override;

private:
  InputDistribution dist_;
  MultiIndexSet indices_;
  Eigen::MatrixXd coefficients_;
  long build_evaluations_ = 0;
};

// Caches evaluations of an inner model keyed on the exact input vector, so
// repeated quadrature nodes across iterations cost one true solve. The
// underlying model's counter only advances on cache misses.
class MemoizedModel final : public ForwardModel {
public:
  explicit MemoizedModel(const ForwardModel& inner) : inner_(inner) {}
  int input_dim() const override { return inner_.input_dim(); }
  int output_dim() const override { return inner_.output_dim(); }
  std::size_t cache_size() const;

protected:
  Eigen::VectorXd eval_impl(const Eigen::VectorXd& y) const override;

private:
  const ForwardModel& inner_;
  mutable std::mutex mutex_;
  mutable std::map<std::vector<double>, Eigen::VectorXd> cache_;
};

struct L2ErrorEstimate {
  double aggregate = 0.0;           // sqrt(E_q ||G - G~||^2)
  Eigen::VectorXd per_output;       // componentwise L2 errors
  double aggregate_standard_error = 0.0;
};

// Monte Carlo estimate of the dist-weighted L2 error of the surrogate.
L2ErrorEstimate l2_error(const PCSurrogate& surrogate, const ForwardModel& model,
                         const InputDistribution& dist, int n_mc, std::uint64_t seed);

} // namespace apcs

#endif
