#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <vector>

namespace rgp {

// Seedable generator that can be split into independent, deterministic
// sub-streams. A sub-stream depends only on the parent's seed and the index,
// never on how much of the parent has been consumed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0);

  std::uint64_t seed() const { return seed_; }
  Rng substream(std::uint64_t index) const;

  double normal();
  Eigen::MatrixXd standard_normal(Eigen::Index rows, Eigen::Index cols);
  // Uniform integer in [0, n).
  std::uint64_t uniform_index(std::uint64_t n);
  // Uniformly random permutation of 0..n-1.
  std::vector<int> permutation(int n);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace rgp
