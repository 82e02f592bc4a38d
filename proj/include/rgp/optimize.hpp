#pragma once

#include <Eigen/Dense>
#include <functional>

namespace rgp {

using Objective = std::function<double(const Eigen::VectorXd&)>;

struct BfgsOptions {
  int max_iter = 500;
  double tol = 1e-8;      // on ||grad||_inf / (1 + |f|)
  double fd_step = 1e-5;  // central-difference step
};

struct BfgsResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Central differences; evaluations that throw an rgp::Error count as +inf.
Eigen::VectorXd central_difference_gradient(const Objective& f, const Eigen::VectorXd& x, double h);

// Quasi-Newton minimization with Armijo backtracking. Trial points where the
// objective throws an rgp::Error (cut locus, loss of definiteness) are treated
// as +inf and rejected. The value
// at the returned point never exceeds the value at x0.
BfgsResult minimize_bfgs(const Objective& f, const Eigen::VectorXd& x0, const BfgsOptions& options = {});

}  // namespace rgp
