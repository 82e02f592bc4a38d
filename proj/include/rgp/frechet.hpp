#pragma once

#include <vector>

#include "rgp/curves.hpp"
#include "rgp/manifold.hpp"

namespace rgp {

struct FrechetConfig {
  int max_iter = 200;
  double tol = 1e-10;   // threshold on the norm of the mean of logs
  double step = 1.0;    // relaxation factor in (0, 1]

  void validate() const;
};

struct FrechetTrace {
  int iterations = 0;
  std::vector<double> functional;  // F_n at the initial point and after every accepted step
};

// (1/n) sum_i dist^2(p, x_i).
double frechet_functional(const Manifold& m, const Point& p, const std::vector<Point>& pts);

// Sample Frechet mean by the fixed-point iteration p <- exp_p(step * mean_i log_p(x_i)),
// with the step halved whenever the functional would increase.
Point frechet_mean(const Manifold& m, const std::vector<Point>& pts, const FrechetConfig& cfg = {},
                   FrechetTrace* trace = nullptr);
Point frechet_mean(const Manifold& m, const std::vector<Point>& pts, const Point& init, const FrechetConfig& cfg,
                   FrechetTrace* trace = nullptr);

// Pointwise Frechet mean curve, warm-started from the previous time's mean.
DiscreteCurve frechet_mean_curve(const std::vector<DiscreteCurve>& samples, const FrechetConfig& cfg = {});

}  // namespace rgp
