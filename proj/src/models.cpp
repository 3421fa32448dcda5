#include "apcs/models.hpp"

#include <cmath>
#include <sstream>

#include "apcs/errors.hpp"

namespace apcs {

// ---------------------------------------------------------------------------
// Source model
// ---------------------------------------------------------------------------

SourceModel::SourceModel(SourceModelConfig config) : config_(std::move(config)) {
  const int n = config_.mesh_n;
  if (n < 3) throw ConfigError("source model: mesh_n must be >= 3");
  if (!(config_.width > 0.0) || !(config_.shutoff > 0.0))
    throw ConfigError("source model: width and shutoff must be positive");
  for (double tm : config_.measurement_times)
    if (tm <= 0.0) throw ConfigError("source model: measurement times must be positive");
  h_ = 1.0 / (n - 1);

  // Trapezoid node weights (tensorized), so the reflected 5-point Laplacian
  // telescopes to zero and discrete mass is conserved.
  cell_weights_.resize(n * n);
  auto w1 = [n](int i) { return (i == 0 || i == n - 1) ? 0.5 : 1.0; };
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) cell_weights_[r * n + c] = w1(r) * w1(c);

  // Implicit Euler matrix A = I - dt*L, constant across evaluations.
  const double a = config_.dt / (h_ * h_);
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(5) * n * n);
  auto idx = [n](int r, int c) { return r * n + c; };
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      trips.emplace_back(idx(r, c), idx(r, c), 1.0 + 4.0 * a);
      auto nb = [&](int rr, int cc) {
        // Reflect across the boundary for the homogeneous Neumann condition.
        if (rr < 0) rr = 1;
        if (rr > n - 1) rr = n - 2;
        if (cc < 0) cc = 1;
        if (cc > n - 1) cc = n - 2;
        trips.emplace_back(idx(r, c), idx(rr, cc), -a);
      };
      nb(r - 1, c);
      nb(r + 1, c);
      nb(r, c - 1);
      nb(r, c + 1);
    }
  }
  Eigen::SparseMatrix<double> A(n * n, n * n);
  A.setFromTriplets(trips.begin(), trips.end());
  solver_ = std::make_shared<Eigen::SparseLU<Eigen::SparseMatrix<double>>>();
  solver_->compute(A);
  if (solver_->info() != Eigen::Success)
    throw NumericalError("source model: sparse factorization failed (mesh_n=" +
                         std::to_string(n) + ")");
}

Eigen::VectorXd SourceModel::source_vector(const Eigen::VectorXd& x_src) const {
  const int n = config_.mesh_n;
  const double amp = config_.strength / (2.0 * M_PI * config_.width * config_.width);
  const double inv2w2 = 1.0 / (2.0 * config_.width * config_.width);
  Eigen::VectorXd s(n * n);
  for (int r = 0; r < n; ++r) {
    double y = r * h_;
    for (int c = 0; c < n; ++c) {
      double x = c * h_;
      double d2 = (x - x_src[0]) * (x - x_src[0]) + (y - x_src[1]) * (y - x_src[1]);
      s[r * n + c] = amp * std::exp(-d2 * inv2w2);
    }
  }
  return s;
}

double SourceModel::interpolate(const Eigen::VectorXd& field, double x, double y) const {
  const int n = config_.mesh_n;
  double fx = std::clamp(x, 0.0, 1.0) / h_;
  double fy = std::clamp(y, 0.0, 1.0) / h_;
  int c = std::min(static_cast<int>(fx), n - 2);
  int r = std::min(static_cast<int>(fy), n - 2);
  double tx = fx - c, ty = fy - r;
  return (1 - tx) * (1 - ty) * field[r * n + c] + tx * (1 - ty) * field[r * n + c + 1] +
         (1 - tx) * ty * field[(r + 1) * n + c] + tx * ty * field[(r + 1) * n + c + 1];
}

Eigen::VectorXd SourceModel::march(const Eigen::VectorXd& x_src, double t_final,
                                   Eigen::VectorXd* sensors_out) const {
  const int n = config_.mesh_n;
  const double dt = config_.dt;
  Eigen::VectorXd s = source_vector(x_src);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(n * n);

  const auto& times = config_.measurement_times;
  const auto& sc = config_.sensor_coords;
  const int n_sensors = static_cast<int>(sc.size() * sc.size());
  Eigen::MatrixXd readings(n_sensors, times.size());
  std::vector<bool> recorded(times.size(), false);

  auto record = [&](double t_prev, double t_next, const Eigen::VectorXd& u_prev,
                    const Eigen::VectorXd& u_next) {
    for (std::size_t ti = 0; ti < times.size(); ++ti) {
      if (recorded[ti] || times[ti] > t_next + 1e-12) continue;
      double w = (times[ti] - t_prev) / (t_next - t_prev);
      int si = 0;
      for (double sx : sc)
        for (double sy : sc) {
          readings(si, ti) = (1 - w) * interpolate(u_prev, sx, sy) +
                             w * interpolate(u_next, sx, sy);
          ++si;
        }
      recorded[ti] = true;
    }
  };

  double t = 0.0;
  while (t < t_final - 1e-12) {
    double step = std::min(dt, t_final - t);
    double t_next = t + step;
    bool active = t_next <= config_.shutoff + 1e-12;
    Eigen::VectorXd rhs = u;
    if (active) rhs += step * s;
    Eigen::VectorXd u_next;
    if (step == dt) {
      u_next = solver_->solve(rhs);
    } else {
      // Final fractional step; factor the matching matrix on the fly.
      SourceModelConfig cfg = config_;
      cfg.dt = step;
      u_next = SourceModel(cfg).solver_->solve(rhs);
    }
    if (sensors_out) record(t, t_next, u, u_next);
    u = std::move(u_next);
    t = t_next;
  }

  if (sensors_out) {
    // Sensor-major, time-minor.
    sensors_out->resize(n_sensors * static_cast<int>(times.size()));
    for (int si = 0; si < n_sensors; ++si)
      for (std::size_t ti = 0; ti < times.size(); ++ti)
        (*sensors_out)[si * static_cast<int>(times.size()) + static_cast<int>(ti)] =
            readings(si, ti);
  }
  return u;
}

Eigen::VectorXd SourceModel::eval_impl(const Eigen::VectorXd& y) const {
  double t_final = 0.0;
  for (double tm : config_.measurement_times) t_final = std::max(t_final, tm);
  Eigen::VectorXd sensors;
  march(y, t_final, &sensors);
  return sensors;
}

Eigen::VectorXd SourceModel::field_at(const Eigen::VectorXd& x_src, double t) const {
  return march(x_src, t, nullptr);
}

double SourceModel::integrate_field(const Eigen::VectorXd& field) const {
  return cell_weights_.dot(field) * h_ * h_;
}

// ---------------------------------------------------------------------------
// Heat model
// ---------------------------------------------------------------------------

double flux_eval(const Eigen::VectorXd& coeffs, double t, double period) {
  const int m = static_cast<int>((coeffs.size() - 1) / 2);
  double q = coeffs[0];
  for (int j = 1; j <= m; ++j) {
    double w = 2.0 * M_PI * j * t / period;
    q += coeffs[j] * std::cos(w) + coeffs[m + j] * std::sin(w);
  }
  return q;
}

HeatModel::HeatModel(HeatModelConfig config) : config_(std::move(config)) {
  if (config_.mesh_n < 3) throw ConfigError("heat model: mesh_n must be >= 3");
  if (!(config_.sensor_x > 0.0) || !(config_.sensor_x < config_.length))
    throw ConfigError("heat model: sensor must lie strictly inside the domain");
  if (config_.n_modes < 0 || config_.n_times < 1)
    throw ConfigError("heat model: invalid mode/time counts");
}

namespace {

void thomas_solve(Eigen::VectorXd& lower, Eigen::VectorXd& diag, Eigen::VectorXd& upper,
                  Eigen::VectorXd& rhs) {
  const long n = diag.size();
  for (long i = 1; i < n; ++i) {
    double m = lower[i] / diag[i - 1];
    diag[i] -= m * upper[i - 1];
    rhs[i] -= m * rhs[i - 1];
  }
  rhs[n - 1] /= diag[n - 1];
  for (long i = n - 2; i >= 0; --i) rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
}

inline double conductivity(double u) { return 1.0 / (1.0 + u * u); }

} // namespace

Eigen::VectorXd HeatModel::simulate(
    const Eigen::VectorXd& coeffs,
    const std::function<void(double, const Eigen::VectorXd&)>& observer) const {
  if (coeffs.size() != input_dim())
    throw ConfigError("heat model: expected " + std::to_string(input_dim()) + " coefficients");
  const int n = config_.mesh_n;
  const double T = config_.horizon;
  const double h = config_.length / (n - 1);
  const double dt = config_.dt;

  Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd lower(n), diag(n), upper(n), rhs(n), c(n);

  auto sensor_value = [&](const Eigen::VectorXd& field) {
    double fx = config_.sensor_x / h;
    int j = std::min(static_cast<int>(fx), n - 2);
    double tx = fx - j;
    return (1 - tx) * field[j] + tx * field[j + 1];
  };

  Eigen::VectorXd out(config_.n_times);
  int next_meas = 0;

  double t = 0.0;
  while (t < T - 1e-12) {
    double step = std::min(dt, T - t);
    double t_next = t + step;
    double q = flux_eval(coeffs, t_next, T);

    // Implicit Euler with lagged conductivity: fixed-point in c(u).
    Eigen::VectorXd iter = u;
    int it = 0;
    for (;; ++it) {
      if (it >= config_.max_fixed_point) {
        std::ostringstream os;
        os << "heat model: fixed-point iteration did not converge (mesh_n=" << n
           << ", dt=" << step << ", t=" << t_next << ")";
        throw NumericalError(os.str());
      }
      for (int j = 0; j < n; ++j) c[j] = conductivity(iter[j]);
      const double a = step / (h * h);
      for (int j = 1; j < n - 1; ++j) {
        double cm = 0.5 * (c[j - 1] + c[j]);
        double cp = 0.5 * (c[j] + c[j + 1]);
        lower[j] = -a * cm;
        upper[j] = -a * cp;
        diag[j] = 1.0 + a * (cm + cp);
        rhs[j] = u[j];
      }
      {
        double cp = 0.5 * (c[0] + c[1]);
        lower[0] = 0.0;
        upper[0] = -2.0 * a * cp;
        diag[0] = 1.0 + 2.0 * a * cp;
        rhs[0] = u[0] - 2.0 * (step / h) * c[0] * q;
      }
      {
        double cm = 0.5 * (c[n - 2] + c[n - 1]);
        lower[n - 1] = -2.0 * a * cm;
        upper[n - 1] = 0.0;
        diag[n - 1] = 1.0 + 2.0 * a * cm;
        rhs[n - 1] = u[n - 1];
      }
      Eigen::VectorXd l = lower, d = diag, up = upper, r = rhs;
      thomas_solve(l, d, up, r);
      double delta = (r - iter).cwiseAbs().maxCoeff();
      iter = std::move(r);
      if (delta < config_.fixed_point_tol) break;
    }

    // Measurements at t_i = i*T/n_times, linearly interpolated in time.
    while (next_meas < config_.n_times) {
      double tm = (next_meas + 1) * T / config_.n_times;
      if (tm > t_next + 1e-12) break;
      double w = (tm - t) / (t_next - t);
      out[next_meas] = (1 - w) * sensor_value(u) + w * sensor_value(iter);
      ++next_meas;
    }

    u = std::move(iter);
    t = t_next;
    if (observer) observer(t, u);
  }
  if (next_meas != config_.n_times)
    throw NumericalError("heat model: time marching ended before all measurements");
  return out;
}

} // namespace apcs
