#include "rgp/optimize.hpp"

#include <cmath>
#include <limits>

#include "rgp/errors.hpp"

namespace rgp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double safe_eval(const Objective& f, const Eigen::VectorXd& x) {
  try {
    const double v = f(x);
    return std::isfinite(v) ? v : kInf;
  } catch (const Error&) {
    // Cut-locus hits and numerically invalid points (e.g. overflowing SPD exponentials).
    return kInf;
  }
}

}  // namespace

Eigen::VectorXd central_difference_gradient(const Objective& f, const Eigen::VectorXd& x, double h) {
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    probe[i] = xi + h;
    const double up = safe_eval(f, probe);
    probe[i] = xi - h;
    const double down = safe_eval(f, probe);
    probe[i] = xi;
    if (std::isfinite(up) && std::isfinite(down)) {
      g[i] = (up - down) / (2.0 * h);
    } else {
      // One-sided fallback next to an excluded region.
      const double centre = f(x);
      g[i] = std::isfinite(up) ? (up - centre) / h : std::isfinite(down) ? (centre - down) / h : 0.0;
    }
  }
  return g;
}

BfgsResult minimize_bfgs(const Objective& f, const Eigen::VectorXd& x0, const BfgsOptions& options) {
  const Eigen::Index n = x0.size();
  BfgsResult res;
  res.x = x0;
  res.value = f(x0);
  if (!std::isfinite(res.value)) throw NoConvergenceError("objective is not finite at the starting point");

  Eigen::VectorXd g = central_difference_gradient(f, res.x, options.fd_step);
  Eigen::MatrixXd H = Eigen::MatrixXd::Identity(n, n);
  bool scaled = false;

  for (int it = 0; it < options.max_iter; ++it) {
    if (g.lpNorm<Eigen::Infinity>() <= options.tol * (1.0 + std::abs(res.value))) {
      res.converged = true;
      return res;
    }
    Eigen::VectorXd p = -H * g;
    double slope = g.dot(p);
    if (!(slope < 0.0)) {
      H.setIdentity();
      p = -g;
      slope = -g.squaredNorm();
    }

    // Before any curvature information exists, keep the first trial step at unit length.
    double alpha = scaled ? 1.0 : std::min(1.0, 1.0 / p.lpNorm<Eigen::Infinity>());
    double trial_value = kInf;
    Eigen::VectorXd trial;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      trial = res.x + alpha * p;
      trial_value = safe_eval(f, trial);
      if (trial_value <= res.value + 1e-4 * alpha * slope && trial_value < res.value) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      // No decrease is available along any tried step: stationary to working precision.
      res.converged = true;
      return res;
    }

    const Eigen::VectorXd g_new = central_difference_gradient(f, trial, options.fd_step);
    const Eigen::VectorXd s = trial - res.x;
    const Eigen::VectorXd y = g_new - g;
    const double rel_gain = (res.value - trial_value) / (1.0 + std::abs(res.value));
    res.x = trial;
    res.value = trial_value;
    g = g_new;
    res.iterations = it + 1;

    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      if (!scaled) {
        H = Eigen::MatrixXd::Identity(n, n) * (sy / y.squaredNorm());
        scaled = true;
      }
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
      H = (I - rho * s * y.transpose()) * H * (I - rho * y * s.transpose()) + rho * s * s.transpose();
    }
    if (rel_gain < 1e-16 && s.lpNorm<Eigen::Infinity>() < 1e-14 * (1.0 + res.x.lpNorm<Eigen::Infinity>())) {
      res.converged = true;
      return res;
    }
  }
  if (g.lpNorm<Eigen::Infinity>() <= options.tol * (1.0 + std::abs(res.value))) {
    res.converged = true;
    return res;
  }
  throw NoConvergenceError("quasi-Newton iteration did not converge in " + std::to_string(options.max_iter) +
                           " iterations");
}

}  // namespace rgp
