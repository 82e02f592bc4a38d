#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <vector>

#include "rgp/curves.hpp"
#include "rgp/manifold.hpp"
#include "rgp/model.hpp"
#include "rgp/random.hpp"

namespace fixtures {

inline Eigen::MatrixXd random_symmetric(int r, rgp::Rng& rng) {
  const Eigen::MatrixXd G = rng.standard_normal(r, r);
  return 0.5 * (G + G.transpose());
}

inline rgp::Point random_point(const rgp::Manifold& m, rgp::Rng& rng) {
  using rgp::ManifoldKind;
  switch (m.kind) {
    case ManifoldKind::euclidean:
      return rng.standard_normal(m.d, 1);
    case ManifoldKind::sphere:
      return rng.standard_normal(m.q, 1).normalized();
    case ManifoldKind::so3quat: {
      Eigen::VectorXd x = rng.standard_normal(4, 1).normalized();
      return x[0] < 0 ? Eigen::VectorXd(-x) : x;
    }
    case ManifoldKind::spd: {
      const int r = m.matrix_size();
      return rgp::as_flat(rgp::sym_funcm(rgp::SymFunc::exp, 0.5 * random_symmetric(r, rng)));
    }
  }
  return {};
}

// Tangent vector at p with Riemannian norm `length` in a random direction.
inline Eigen::VectorXd random_tangent(const rgp::Manifold& m, const rgp::Point& p, double length, rgp::Rng& rng) {
  const Eigen::MatrixXd F = rgp::frame_at(m, p);
  const Eigen::VectorXd c = rng.standard_normal(m.d, 1).normalized();
  return F * (length * c);
}

// Smooth flat coordinates (d x r): a random low-frequency trigonometric path.
inline Eigen::MatrixXd smooth_coords(int d, int r, double amplitude, rgp::Rng& rng) {
  const Eigen::MatrixXd a = rng.standard_normal(d, 3);
  const Eigen::MatrixXd ph = rng.standard_normal(d, 3);
  Eigen::MatrixXd z(d, r);
  for (int j = 0; j < r; ++j) {
    const double t = static_cast<double>(j) / (r - 1);
    for (int i = 0; i < d; ++i) {
      double v = 0.0;
      for (int h = 0; h < 3; ++h) v += a(i, h) * std::sin((h + 1) * std::numbers::pi * t + ph(i, h)) / (h + 1);
      z(i, j) = amplitude * v;
    }
  }
  return z;
}

// Smooth random curve on m obtained by rolling smooth flat coordinates from a random base.
inline rgp::DiscreteCurve smooth_curve(const rgp::Manifold& m, int r, double amplitude, rgp::Rng& rng) {
  const rgp::Point b = random_point(m, rng);
  return rgp::Development::roll(m, b, rgp::frame_at(m, b), smooth_coords(m.d, r, amplitude, rng)).curve();
}

inline double max_pointwise_distance(const rgp::DiscreteCurve& a, const rgp::DiscreteCurve& b) {
  double worst = 0.0;
  for (int j = 0; j < a.size(); ++j) worst = std::max(worst, rgp::distance(a.manifold, a.point(j), b.point(j)));
  return worst;
}

// Rotation of R^q taking e_1 towards a random direction (for equivariance checks).
inline Eigen::MatrixXd random_orthogonal(int q, rgp::Rng& rng) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(rng.standard_normal(q, q));
  Eigen::MatrixXd Q = qr.householderQ();
  if (Q.determinant() < 0) Q.col(0) *= -1.0;
  return Q;
}

// Copy of a model with the column covariance (hence the noise variance) scaled.
inline rgp::RGPModel scaled_model(rgp::RGPModel model, double scale) {
  model.params.V *= scale;
  return model;
}

}  // namespace fixtures
