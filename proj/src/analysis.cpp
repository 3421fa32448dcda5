#include "apcs/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "apcs/errors.hpp"
#include "apcs/models.hpp"
#include "apcs/rng.hpp"

namespace apcs {

namespace {

constexpr double kDensityFloor = 1e-300;

Eigen::VectorXd linspace(double a, double b, int n) {
  return Eigen::VectorXd::LinSpaced(n, a, b);
}

// Trapezoidal weights over one axis, including the spacing.
Eigen::VectorXd trapezoid_weights(const Eigen::VectorXd& axis) {
  const int n = static_cast<int>(axis.size());
  double h = (axis[n - 1] - axis[0]) / double(n - 1);
  Eigen::VectorXd w = Eigen::VectorXd::Constant(n, h);
  w[0] *= 0.5;
  w[n - 1] *= 0.5;
  return w;
}

double silverman_bandwidth(const Eigen::VectorXd& column) {
  const double n = double(column.size());
  double mu = column.mean();
  double var = (column.array() - mu).square().sum() / (n - 1.0);
  if (var <= 0.0)
    throw NumericalError("kde2: zero-variance sample column, bandwidth undefined");
  return 1.06 * std::sqrt(var) * std::pow(n, -1.0 / 6.0);
}

// Discrete Gaussian kernel sampled on the grid spacing, truncated where the
// tail is negligible.
std::vector<double> kernel_taps(double h, double spacing, int max_radius) {
  int radius = std::min(max_radius, static_cast<int>(std::ceil(8.0 * h / spacing)));
  std::vector<double> taps(static_cast<std::size_t>(radius) + 1);
  const double norm = 1.0 / (h * std::sqrt(2.0 * M_PI));
  for (int k = 0; k <= radius; ++k) {
    double z = k * spacing / h;
    taps[static_cast<std::size_t>(k)] = norm * std::exp(-0.5 * z * z);
  }
  return taps;
}

} // namespace

Grid2D Grid2D::regular(double x0, double x1, double y0, double y1, int n) {
  if (n < 2 || x1 <= x0 || y1 <= y0) throw ConfigError("Grid2D: degenerate extent");
  return Grid2D{linspace(x0, x1, n), linspace(y0, y1, n)};
}

Grid2D joint_grid(const Eigen::MatrixXd& p_samples, const Eigen::MatrixXd& q_samples,
                  int n) {
  if (p_samples.cols() != 2 || q_samples.cols() != 2)
    throw ConfigError("joint_grid: sample sets must have two columns");
  double pad[2];
  for (int j = 0; j < 2; ++j)
    pad[j] = 3.0 * std::max(silverman_bandwidth(p_samples.col(j)),
                            silverman_bandwidth(q_samples.col(j)));
  double x0 = std::min(p_samples.col(0).minCoeff(), q_samples.col(0).minCoeff()) - pad[0];
  double x1 = std::max(p_samples.col(0).maxCoeff(), q_samples.col(0).maxCoeff()) + pad[0];
  double y0 = std::min(p_samples.col(1).minCoeff(), q_samples.col(1).minCoeff()) - pad[1];
  double y1 = std::max(p_samples.col(1).maxCoeff(), q_samples.col(1).maxCoeff()) + pad[1];
  return Grid2D::regular(x0, x1, y0, y1, n);
}

double KDE2D::integral() const {
  Eigen::VectorXd wx = trapezoid_weights(grid.x);
  Eigen::VectorXd wy = trapezoid_weights(grid.y);
  return wx.dot(density * wy);
}

KDE2D kde2(const Eigen::MatrixXd& samples, const Grid2D& grid) {
  const long n = samples.rows();
  if (samples.cols() != 2) throw ConfigError("kde2: samples must have two columns");
  if (n < 100) throw ConfigError("kde2: need at least 100 samples");

  KDE2D out;
  out.grid = grid;
  out.h1 = silverman_bandwidth(samples.col(0));
  out.h2 = silverman_bandwidth(samples.col(1));

  const int nx = grid.nx(), ny = grid.ny();
  const double dx = grid.dx(), dy = grid.dy();
  const double x0 = grid.x[0], y0 = grid.y[0];

  // Linear binning of the samples onto the grid, then separable convolution
  // with the discretized Gaussian kernels.
  Eigen::MatrixXd bins = Eigen::MatrixXd::Zero(nx, ny);
  long inside = 0;
  for (long s = 0; s < n; ++s) {
    double fx = (samples(s, 0) - x0) / dx;
    double fy = (samples(s, 1) - y0) / dy;
    if (fx < 0.0 || fx > nx - 1 || fy < 0.0 || fy > ny - 1) continue;
    ++inside;
    int i = std::min(static_cast<int>(fx), nx - 2);
    int j = std::min(static_cast<int>(fy), ny - 2);
    double wx = fx - i, wy = fy - j;
    bins(i, j) += (1.0 - wx) * (1.0 - wy);
    bins(i + 1, j) += wx * (1.0 - wy);
    bins(i, j + 1) += (1.0 - wx) * wy;
    bins(i + 1, j + 1) += wx * wy;
  }
  out.coverage = double(inside) / double(n);

  std::vector<double> kx = kernel_taps(out.h1, dx, nx - 1);
  std::vector<double> ky = kernel_taps(out.h2, dy, ny - 1);

  Eigen::MatrixXd tmp = Eigen::MatrixXd::Zero(nx, ny);
  const int rx = static_cast<int>(kx.size()) - 1;
  for (int i = 0; i < nx; ++i) {
    int lo = std::max(0, i - rx), hi = std::min(nx - 1, i + rx);
    for (int k = lo; k <= hi; ++k)
      tmp.row(i) += kx[static_cast<std::size_t>(std::abs(i - k))] * bins.row(k);
  }
  out.density = Eigen::MatrixXd::Zero(nx, ny);
  const int ry = static_cast<int>(ky.size()) - 1;
  for (int j = 0; j < ny; ++j) {
    int lo = std::max(0, j - ry), hi = std::min(ny - 1, j + ry);
    for (int k = lo; k <= hi; ++k)
      out.density.col(j) += ky[static_cast<std::size_t>(std::abs(j - k))] * tmp.col(k);
  }
  out.density /= double(n);
  return out;
}

namespace {

double kl_once(const Eigen::MatrixXd& p_samples, const Eigen::MatrixXd& q_samples,
               const Grid2D& grid, bool check_coverage) {
  KDE2D p = kde2(p_samples, grid);
  KDE2D q = kde2(q_samples, grid);
  if (check_coverage && (p.coverage < 0.999 || q.coverage < 0.999))
    throw ConfigError("kl_divergence_2d: grid covers less than 99.9% of sample mass");
  Eigen::VectorXd wx = trapezoid_weights(grid.x);
  Eigen::VectorXd wy = trapezoid_weights(grid.y);
  double acc = 0.0;
  for (int i = 0; i < grid.nx(); ++i)
    for (int j = 0; j < grid.ny(); ++j) {
      double pd = std::max(p.density(i, j), kDensityFloor);
      double qd = std::max(q.density(i, j), kDensityFloor);
      if (p.density(i, j) <= 0.0) continue;
      acc += wx[i] * wy[j] * p.density(i, j) * std::log(pd / qd);
    }
  return acc;
}

Eigen::MatrixXd resample_rows(const Eigen::MatrixXd& m, Rng& rng) {
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (long s = 0; s < m.rows(); ++s)
    out.row(s) = m.row(static_cast<long>(rng.below(static_cast<std::uint64_t>(m.rows()))));
  return out;
}

} // namespace

KLEstimate kl_divergence_2d(const Eigen::MatrixXd& p_samples,
                            const Eigen::MatrixXd& q_samples, const Grid2D& grid,
                            int n_bootstrap, std::uint64_t seed) {
  KLEstimate est;
  est.value = kl_once(p_samples, q_samples, grid, true);
  if (n_bootstrap > 1) {
    Rng rng(seed);
    Eigen::VectorXd reps(n_bootstrap);
    for (int b = 0; b < n_bootstrap; ++b)
      reps[b] = kl_once(resample_rows(p_samples, rng), resample_rows(q_samples, rng),
                        grid, false);
    double mu = reps.mean();
    est.standard_error =
        std::sqrt((reps.array() - mu).square().sum() / double(n_bootstrap - 1));
  }
  return est;
}

double kl_between_grids(const Eigen::MatrixXd& log_p, const Eigen::MatrixXd& log_q,
                        const Grid2D& grid) {
  if (log_p.rows() != grid.nx() || log_p.cols() != grid.ny() ||
      log_q.rows() != grid.nx() || log_q.cols() != grid.ny())
    throw ConfigError("kl_between_grids: grid/value shape mismatch");
  Eigen::VectorXd wx = trapezoid_weights(grid.x);
  Eigen::VectorXd wy = trapezoid_weights(grid.y);

  auto normalized_log = [&](const Eigen::MatrixXd& lg) {
    double shift = lg.maxCoeff();
    double z = 0.0;
    for (int i = 0; i < grid.nx(); ++i)
      for (int j = 0; j < grid.ny(); ++j) z += wx[i] * wy[j] * std::exp(lg(i, j) - shift);
    if (!(z > 0.0) || !std::isfinite(z))
      throw NumericalError("kl_between_grids: density does not normalize on the grid");
    return Eigen::MatrixXd(lg.array() - shift - std::log(z));
  };
  Eigen::MatrixXd lp = normalized_log(log_p);
  Eigen::MatrixXd lq = normalized_log(log_q);

  double acc = 0.0;
  for (int i = 0; i < grid.nx(); ++i)
    for (int j = 0; j < grid.ny(); ++j) {
      double p = std::exp(lp(i, j));
      if (p <= 0.0) continue;
      acc += wx[i] * wy[j] * p * (lp(i, j) - std::max(lq(i, j), std::log(kDensityFloor)));
    }
  return acc;
}

FluxMoments flux_moments(const Eigen::MatrixXd& coeff_samples,
                         const Eigen::VectorXd& times, double period) {
  const long n = coeff_samples.rows();
  const int nc = static_cast<int>(coeff_samples.cols());
  const int nt = static_cast<int>(times.size());
  if (n < 1000) throw ConfigError("flux_moments: need at least 1000 samples");
  if (nc < 1 || nc % 2 == 0)
    throw ConfigError("flux_moments: coefficient count must be odd (a_0, a_j, b_j)");

  // The flux is linear in the coefficients: q(t) = B(t) . c.
  const int n_modes = (nc - 1) / 2;
  Eigen::MatrixXd basis(nt, nc);
  for (int t = 0; t < nt; ++t) {
    basis(t, 0) = 1.0;
    for (int j = 1; j <= n_modes; ++j) {
      double arg = 2.0 * M_PI * j * times[t] / period;
      basis(t, j) = std::cos(arg);
      basis(t, n_modes + j) = std::sin(arg);
    }
  }

  Eigen::MatrixXd flux = coeff_samples * basis.transpose(); // n x nt
  FluxMoments out;
  out.times = times;
  out.mean = flux.colwise().mean();
  Eigen::MatrixXd centered = flux.rowwise() - out.mean.transpose();
  out.autocovariance = centered.transpose() * centered / double(n - 1);
  out.variance = out.autocovariance.diagonal();
  out.skewness.resize(nt);
  for (int t = 0; t < nt; ++t) {
    double m3 = centered.col(t).array().cube().sum() / double(n);
    double m2 = centered.col(t).squaredNorm() / double(n);
    out.skewness[t] = m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;
  }
  return out;
}

} // namespace apcs
