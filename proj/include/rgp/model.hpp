#pragma once

#include <Eigen/Dense>
#include <vector>

#include "rgp/curves.hpp"
#include "rgp/manifold.hpp"
#include "rgp/random.hpp"

namespace rgp {

// Cubic (order 4) B-spline basis with k functions on [0, 1]: clamped end
// knots and k - 4 equally spaced interior knots, so the breakpoints are k - 2
// equally spaced points including both ends.
struct BasisSpec {
  static constexpr int order = 4;
  int k = 10;

  void validate() const;
  // Full clamped knot vector (k + 4 entries).
  Eigen::VectorXd knots() const;
};

// Values phi_s(t) for s = 0..k-1 via the Cox-de Boor recursion.
Eigen::VectorXd bspline_values(const BasisSpec& spec, double t);

// Basis matrix Phi (k x r) with Phi(s, j) = phi_s(t_j). Requires r > k.
Eigen::MatrixXd bspline_matrix(const BasisSpec& spec, const TimeGrid& grid);

// Phi^- = Phi^T (Phi Phi^T)^{-1}, the r x k right inverse of a full-row-rank Phi.
Eigen::MatrixXd right_inverse(const Eigen::MatrixXd& phi);

// Parameters of the matrix normal MN(M, U, V): mean d x k, row covariance
// d x d, column covariance k x k.
struct MNParams {
  Eigen::MatrixXd M;
  Eigen::MatrixXd U;
  Eigen::MatrixXd V;

  int d() const { return static_cast<int>(M.rows()); }
  int k() const { return static_cast<int>(M.cols()); }
  void validate() const;
};

// W = M + U^{1/2} G V^{1/2} with G filled column by column from rng.
Eigen::MatrixXd sample_mn(const MNParams& params, Rng& rng);

struct RGPModel {
  Manifold manifold;
  MNParams params;
  Point base;
  Eigen::MatrixXd frame;  // q x d, orthonormal at base
  BasisSpec basis;
  TimeGrid grid;

  void validate() const;
};

// Rolled mean curve: the rolling of M_w Phi from (base, frame).
DiscreteCurve mean_curve(const RGPModel& model);

struct SimulateOptions {
  // enforce: throw CutLocusError when a draw deviates from the rolled mean by
  // more than the injectivity radius; allow: wrap it regardless.
  InjectivityCheck injectivity = InjectivityCheck::enforce;
};

struct Simulation {
  std::vector<DiscreteCurve> curves;
  std::vector<Eigen::MatrixXd> Z;  // the flat d x r draws, Z_i = W_i Phi
  std::vector<Eigen::MatrixXd> W;
};

// n draws; curve i uses rng.substream(i), so results do not depend on order.
Simulation simulate(const RGPModel& model, int n, const Rng& rng, const SimulateOptions& options = {});

// H(x; g) = frame coordinates of the unwrapping of x relative to g (d x r).
Eigen::MatrixXd unwrap_coords(const DiscreteCurve& x, const DiscreteCurve& g, const Point& b,
                              const Eigen::MatrixXd& frame);

}  // namespace rgp
