#ifndef APCS_ANALYSIS_HPP
#define APCS_ANALYSIS_HPP

#include <cstdint>

#include <Eigen/Core>

namespace apcs {

// Uniformly spaced evaluation grid for 2D densities.
struct Grid2D {
  Eigen::VectorXd x;
  Eigen::VectorXd y;

  int nx() const { return static_cast<int>(x.size()); }
  int ny() const { return static_cast<int>(y.size()); }
  double dx() const { return (x[x.size() - 1] - x[0]) / double(x.size() - 1); }
  double dy() const { return (y[y.size() - 1] - y[0]) / double(y.size() - 1); }
  static Grid2D regular(double x0, double x1, double y0, double y1, int n);
};

// Grid spanning the union of both sample ranges, padded by three bandwidths.
Grid2D joint_grid(const Eigen::MatrixXd& p_samples, const Eigen::MatrixXd& q_samples,
                  int n = 200);

struct KDE2D {
  Grid2D grid;
  Eigen::MatrixXd density; // nx x ny, density(i, j) at (x[i], y[j])
  double h1 = 0.0;         // per-dimension Gaussian bandwidths
  double h2 = 0.0;
  double coverage = 0.0;   // fraction of samples inside the grid box

  double integral() const; // trapezoidal
};

// Gaussian-product kernel density estimate with Silverman bandwidths
// h_j = 1.06 sigma_j n^{-1/6}. Samples are n x 2.
KDE2D kde2(const Eigen::MatrixXd& samples, const Grid2D& grid);

struct KLEstimate {
  double value = 0.0;
  double standard_error = 0.0;
};

// int p ln(p/q) between kernel density estimates of the two sample sets on a
// shared grid; densities floored at 1e-300 inside the log. The standard error
// comes from bootstrap resamples of both sets.
KLEstimate kl_divergence_2d(const Eigen::MatrixXd& p_samples,
                            const Eigen::MatrixXd& q_samples, const Grid2D& grid,
                            int n_bootstrap = 20, std::uint64_t seed = 1);

// KL divergence between two densities given as (possibly unnormalized) log
// values on the grid; each is normalized by trapezoidal quadrature first.
double kl_between_grids(const Eigen::MatrixXd& log_p, const Eigen::MatrixXd& log_q,
                        const Grid2D& grid);

struct FluxMoments {
  Eigen::VectorXd times;
  Eigen::VectorXd mean;
  Eigen::VectorXd variance;
  Eigen::VectorXd skewness;       // standardized third central moment
  Eigen::MatrixXd autocovariance; // n_t x n_t
};

// Pointwise posterior moments of the Fourier flux over the time grid, from
// coefficient samples (n x n_coeff ordered a_0, a_1..a_m, b_1..b_m).
FluxMoments flux_moments(const Eigen::MatrixXd& coeff_samples,
                         const Eigen::VectorXd& times, double period);

} // namespace apcs

#endif
