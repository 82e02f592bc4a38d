#include "rgp/presets.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rgp {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kRho = 0.9;
constexpr int kPresetPoints = 100;

// Equally spaced s_i = i / (k - 1), i = 0..k-1.
Eigen::VectorXd unit_grid(int k) { return Eigen::VectorXd::LinSpaced(k, 0.0, 1.0); }

RGPModel s2_hetero() {
  const int k = 10;
  const Eigen::VectorXd s = unit_grid(k);
  Eigen::MatrixXd M(2, k);
  Eigen::VectorXd a(k);
  for (int i = 0; i < k; ++i) {
    const double amp = 0.5 + 0.5 * s[i] * s[i];
    M(0, i) = 0.75 * (1.0 + amp * std::cos(5.0 * s[i]));
    M(1, i) = 0.75 * (1.0 + amp * std::sin(5.0 * s[i]));
    a[i] = 1.0 + 0.75 * std::cos(2.0 * kPi * (i + 1) / k);
  }
  RGPModel model;
  model.manifold = Manifold::sphere(2);
  model.params = {M, Eigen::MatrixXd::Identity(2, 2), banded_covariance(a, kRho)};
  model.base = Eigen::Vector3d(-5.0, -5.0, 1.0).normalized();
  model.frame = frame_at(model.manifold, model.base);
  model.basis.k = k;
  model.grid = TimeGrid::uniform(kPresetPoints);
  return model;
}

RGPModel spd_demo() {
  const int k = 5;
  const Eigen::VectorXd s = unit_grid(k);
  Eigen::MatrixXd M(3, k);
  Eigen::VectorXd a(k);
  for (int i = 0; i < k; ++i) {
    M(0, i) = 0.15 * std::cos(5.0 * s[i]);
    M(1, i) = 0.15 * std::sin(5.0 * s[i]);
    M(2, i) = 0.15 * s[i];
    a[i] = 1.0 + 0.75 * std::cos(2.0 * kPi * (i + 1) / k);
  }
  RGPModel model;
  model.manifold = Manifold::spd(2);
  model.params = {M, Eigen::MatrixXd::Identity(3, 3), 1e-3 * banded_covariance(a, kRho)};
  model.base = as_flat(Eigen::Matrix2d::Identity());
  model.frame = frame_at(model.manifold, model.base);
  model.basis.k = k;
  model.grid = TimeGrid::uniform(kPresetPoints);
  return model;
}

// Smooth rotation path with a variance bump late in the trajectory.
RGPModel so3_synthetic(double shift) {
  const int k = 10;
  const Eigen::VectorXd s = unit_grid(k);
  Eigen::MatrixXd M(3, k);
  Eigen::VectorXd a(k);
  for (int i = 0; i < k; ++i) {
    M(0, i) = 0.6 * s[i] + shift;
    M(1, i) = 0.3 * std::sin(2.0 * kPi * s[i]) * s[i];
    M(2, i) = -0.4 * s[i] * s[i];
    a[i] = 0.01 + 0.08 / (1.0 + std::exp(-15.0 * (s[i] - 0.6)));
  }
  Eigen::Matrix3d U;
  U << 1.2, 0.2, 0.0, 0.2, 1.0, 0.1, 0.0, 0.1, 0.8;
  RGPModel model;
  model.manifold = Manifold::so3quat();
  model.params = {M, U, banded_covariance(a, kRho)};
  model.base = Eigen::Vector4d::UnitX();
  model.frame = Eigen::MatrixXd::Zero(4, 3);
  model.frame.bottomRows(3).setIdentity();
  model.basis.k = k;
  model.grid = TimeGrid::uniform(kPresetPoints);
  return model;
}

}  // namespace

Eigen::MatrixXd banded_covariance(const Eigen::VectorXd& a, double rho) {
  const Eigen::Index k = a.size();
  Eigen::MatrixXd V(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      V(i, j) = a[i] * a[j] * std::pow(rho, static_cast<double>(std::abs(i - j)));
    }
  }
  return V;
}

std::vector<std::string> preset_names() { return {"s2-hetero", "spd-demo", "so3-synthetic", "so3-synthetic-shifted"}; }

RGPModel preset_model(const std::string& name) {
  if (name == "s2-hetero") return s2_hetero();
  if (name == "spd-demo") return spd_demo();
  if (name == "so3-synthetic") return so3_synthetic(0.0);
  if (name == "so3-synthetic-shifted") return so3_synthetic(0.15);
  throw std::invalid_argument("unknown preset '" + name + "'");
}

}  // namespace rgp
