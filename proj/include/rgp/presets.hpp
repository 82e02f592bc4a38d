#pragma once

#include <string>
#include <vector>

#include "rgp/model.hpp"

namespace rgp {

// Built-in demo models: s2-hetero, spd-demo, so3-synthetic and
// so3-synthetic-shifted (the same model with a shifted mean, for power runs).
RGPModel preset_model(const std::string& name);
std::vector<std::string> preset_names();

// V[i][j] = a_i a_j rho^|i - j|.
Eigen::MatrixXd banded_covariance(const Eigen::VectorXd& a, double rho);

}  // namespace rgp
