#pragma once

#include <cstdint>
#include <vector>

#include "rgp/estimate.hpp"
#include "rgp/random.hpp"

namespace rgp {

enum class ReferenceCurve {
  per_group,  // each group is unwrapped against its own Frechet mean curve
  pooled,     // both groups are unwrapped against the Frechet mean of the pooled sample
};

struct TestConfig {
  int R = 200;
  std::uint64_t seed = 0;
  bool bootstrap = false;  // resample with replacement instead of permuting labels
  ReferenceCurve reference = ReferenceCurve::per_group;
  FitConfig fit;

  void validate() const;
};

struct TestResult {
  double J_observed = 0.0;
  std::vector<double> J_resampled;
  double p_value = 1.0;
  int R = 0;
  std::uint64_t seed = 0;
};

// J = tr(V^-1 D^T U^-1 D) with D = M1 - M2 and (U, V) pooled with weights n_i - 1.
double hotelling_stat(const MNParams& fit1, const MNParams& fit2, int n1, int n2);
double hotelling_stat(const FitResult& fit1, const FitResult& fit2, int n1, int n2);

// (1 + #{J* > J}) / (1 + R).
double permutation_p_value(double observed, const std::vector<double>& resampled);

// Statistic for one split of the data into two groups.
double two_sample_statistic(const std::vector<DiscreteCurve>& s1, const std::vector<DiscreteCurve>& s2,
                            const BasisSpec& spec, const Point& b, const Eigen::MatrixXd& frame,
                            const TestConfig& cfg);

// Resample r draws its labels from Rng(seed).substream(r).
TestResult permutation_test(const std::vector<DiscreteCurve>& s1, const std::vector<DiscreteCurve>& s2,
                            const BasisSpec& spec, const Point& b, const Eigen::MatrixXd& frame,
                            const TestConfig& cfg);

}  // namespace rgp
