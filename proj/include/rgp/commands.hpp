#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rgp/estimate.hpp"
#include "rgp/model.hpp"

namespace rgp {

struct ConvergenceRow {
  int n = 0;
  int seed = 0;
  double metric_M = 0.0;  // tr{U^-1 (M_hat - M) V^-1 (M_hat - M)^T} under the true U, V
  double metric_U = 0.0;  // affine-invariant distance
  double metric_V = 0.0;
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;     // per (n, seed), n-major
  std::vector<ConvergenceRow> medians;  // one per n; seed is -1
  bool median_M_decreasing = false;
  bool median_U_decreasing = false;
  bool median_V_decreasing = false;
};

// Simulate then fit for every (n, seed); the sample for seed s is drawn from
// Rng(base_seed + s), so samples are nested in n.
ConvergenceTable run_convergence(const RGPModel& model, const std::vector<int>& n_list, int seeds,
                                 std::uint64_t base_seed, const FitConfig& cfg);

std::string convergence_csv(const ConvergenceTable& table);

double median(std::vector<double> values);

// Entry point of the command-line tool. Returns the process exit code:
// 0 success, 1 computation or I/O error, 2 usage error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rgp
