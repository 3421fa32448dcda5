#ifndef APCS_MODELS_HPP
#define APCS_MODELS_HPP

#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "apcs/polychaos.hpp"

namespace apcs {

// Forward model defined by a callable; used for toy problems and oracles.
class CallableModel final : public ForwardModel {
public:
  using Fn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
  CallableModel(int input_dim, int output_dim, Fn fn)
      : ny_(input_dim), nd_(output_dim), fn_(std::move(fn)) {}
  int input_dim() const override { return ny_; }
  int output_dim() const override { return nd_; }

protected:
  Eigen::VectorXd eval_impl(const Eigen::VectorXd& y) const override { return fn_(y); }

private:
  int ny_, nd_;
  Fn fn_;
};

// ---------------------------------------------------------------------------
// 2D diffusion source inversion: du/dt = lap(u) + s(x,t) on [0,1]^2 with
// homogeneous Neumann walls, zero initial condition, unit diffusivity.
// The source is a Gaussian bump of known strength/width active on [0,tau];
// its center is the 2-vector inversion parameter.
// ---------------------------------------------------------------------------
struct SourceModelConfig {
  double strength = 2.0;
  double width = 0.05;
  double shutoff = 0.3; // tau; exceeds the last measurement time by default
  int mesh_n = 51;      // nodes per dimension
  double dt = 1e-3;
  std::vector<double> measurement_times{0.1, 0.2};
  // 3x3 sensor grid covering the domain.
  std::vector<double> sensor_coords{0.0, 0.5, 1.0};
};

class SourceModel final : public ForwardModel {
public:
  explicit SourceModel(SourceModelConfig config);

  int input_dim() const override { return 2; }
  int output_dim() const override {
    return static_cast<int>(config_.sensor_coords.size() * config_.sensor_coords.size() *
                            config_.measurement_times.size());
  }
  const SourceModelConfig& config() const { return config_; }

  // Full concentration field at time t (row-major over the mesh). Does not
  // count as a model evaluation; used by diagnostics.
  Eigen::VectorXd field_at(const Eigen::VectorXd& x_src, double t) const;
  // Trapezoid integral of a field over the domain.
  double integrate_field(const Eigen::VectorXd& field) const;

protected:
  Eigen::VectorXd eval_impl(const Eigen::VectorXd& y) const override;

private:
  Eigen::VectorXd march(const Eigen::VectorXd& x_src, double t_final,
                        Eigen::VectorXd* sensors_out) const;
  Eigen::VectorXd source_vector(const Eigen::VectorXd& x_src) const;
  double interpolate(const Eigen::VectorXd& field, double x, double y) const;

  SourceModelConfig config_;
  double h_;
  Eigen::VectorXd cell_weights_; // trapezoid weights per node
  std::shared_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>>> solver_;
};

// ---------------------------------------------------------------------------
// 1D nonlinear heat conduction: du/dt = d/dx [ c(u) du/dx ], c(u)=1/(1+u^2),
// flux boundary du/dx(0,t) = q(t), insulated right end, zero initial
// condition. Parameters are the 9 Fourier coefficients of q(t).
// ---------------------------------------------------------------------------
struct HeatModelConfig {
  double length = 1.0;
  double horizon = 1.0;
  double sensor_x = 0.4;
  int n_times = 50; // measurements at t_i = i*T/n_times, i=1..n_times
  int n_modes = 4;  // n_y = 2*n_modes + 1
  int mesh_n = 101;
  double dt = 1e-3;
  double fixed_point_tol = 1e-8;
  int max_fixed_point = 100;
};

// Fourier flux q(t) = a_0 + sum_j a_j cos(2 pi j t/T) + b_j sin(2 pi j t/T),
// coefficients ordered (a_0, a_1..a_m, b_1..b_m).
double flux_eval(const Eigen::VectorXd& coeffs, double t, double period = 1.0);

class HeatModel final : public ForwardModel {
public:
  explicit HeatModel(HeatModelConfig config);

  int input_dim() const override { return 2 * config_.n_modes + 1; }
  int output_dim() const override { return config_.n_times; }
  const HeatModelConfig& config() const { return config_; }

  // Runs the solver, invoking the observer after every accepted time step.
  // Returns the sensor history; does not count as a model evaluation.
  Eigen::VectorXd simulate(
      const Eigen::VectorXd& coeffs,
      const std::function<void(double, const Eigen::VectorXd&)>& observer = nullptr) const;

protected:
  Eigen::VectorXd eval_impl(const Eigen::VectorXd& y) const override {
    return simulate(y);
  }

private:
  HeatModelConfig config_;
};

} // namespace apcs

#endif
