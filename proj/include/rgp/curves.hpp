#pragma once

#include <Eigen/Dense>
#include <vector>

#include "rgp/manifold.hpp"

namespace rgp {

// Equally spaced times t_j = j / (r - 1), j = 0..r-1.
struct TimeGrid {
  int r = 0;

  static TimeGrid uniform(int r);
  double time(int j) const { return static_cast<double>(j) / static_cast<double>(r - 1); }
  Eigen::VectorXd times() const;
};

// r points on M sampled on a uniform grid; column j holds gamma(t_j).
struct DiscreteCurve {
  Manifold manifold;
  Eigen::MatrixXd points;  // q x r

  int size() const { return static_cast<int>(points.cols()); }
  TimeGrid grid() const { return TimeGrid::uniform(size()); }
  Point point(int j) const { return points.col(j); }
};

// A curve in T_bM expressed in frame coordinates; the base point itself is
// the origin (coords hold frame^T (y - b)).
struct FlatCurve {
  Point base;
  Eigen::MatrixXd frame;   // q x d
  Eigen::MatrixXd coords;  // d x r
};

// Parallel transport of t from curve point j_from to j_to along the piecewise
// geodesic through consecutive points.
Tangent transport_along(const DiscreteCurve& c, int j_from, int j_to, const Tangent& t);

FlatCurve unroll(const DiscreteCurve& c, const Point& b, const Eigen::MatrixXd& frame);
DiscreteCurve roll(const FlatCurve& f, const Manifold& m);
FlatCurve unwrap(const DiscreteCurve& x, const DiscreteCurve& g, const Point& b, const Eigen::MatrixXd& frame);
DiscreteCurve wrap(const FlatCurve& y, const DiscreteCurve& g);

// Whether wrap rejects flat deviations beyond the injectivity radius at the
// base curve (where unwrap would no longer invert it).
enum class InjectivityCheck { enforce, allow };

// Development of a base curve g into T_bM. Holds, for every j, the frame at b
// parallel transported to g(t_j) (first along the geodesic b -> g(0), then
// along g), together with the unrolled coordinates of g. Unwrapping and
// wrapping relative to g then cost one log/exp per time point.
class Development {
 public:
  Development(DiscreteCurve base_curve, Point b, Eigen::MatrixXd frame);

  // Rolls flat coordinates onto M and returns the development of the result.
  static Development roll(const Manifold& m, const Point& b, const Eigen::MatrixXd& frame,
                          const Eigen::MatrixXd& coords);

  const DiscreteCurve& curve() const { return curve_; }
  const Point& base() const { return base_; }
  const Eigen::MatrixXd& frame() const { return frame_; }
  const Eigen::MatrixXd& unrolled() const { return unrolled_; }
  const Eigen::MatrixXd& transported_frame(int j) const { return frames_[static_cast<std::size_t>(j)]; }

  // Unwrapping coordinates of x relative to the base curve (d x r).
  Eigen::MatrixXd unwrap(const DiscreteCurve& x) const;
  DiscreteCurve wrap(const Eigen::MatrixXd& coords, InjectivityCheck check = InjectivityCheck::enforce) const;

 private:
  Development() = default;

  DiscreteCurve curve_;
  Point base_;
  Eigen::MatrixXd frame_;
  std::vector<Eigen::MatrixXd> frames_;
  Eigen::MatrixXd unrolled_;
};

// Throws CutLocusError when x is (numerically) on the cut locus of p.
void require_outside_cut_locus(const Manifold& m, const Point& p, const Point& x);

}  // namespace rgp
