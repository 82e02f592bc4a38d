#include "rgp/curves.hpp"

#include <numbers>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "rgp/errors.hpp"

namespace rgp {

namespace {

// Coordinates of v (tangent at p) against a transported frame F at p.
Eigen::VectorXd coords_in(const Manifold& m, const Point& p, const Eigen::MatrixXd& F, const Eigen::VectorXd& v) {
  return frame_coords(m, p, F, v);
}

Eigen::MatrixXd transport_frame(const Manifold& m, const Point& from, const Point& to, const Eigen::MatrixXd& F) {
  Eigen::MatrixXd out = transport_columns(m, from, to, F);
  if (m.is_spherical()) {
    // Remove the O(eps) normal component that accumulates along long chains.
    out -= to * (to.transpose() * out);
  }
  return out;
}

void require_same_manifold(const DiscreteCurve& a, const DiscreteCurve& b) {
  if (!(a.manifold == b.manifold) || a.size() != b.size()) {
    throw std::invalid_argument("curves must share manifold and time grid");
  }
}

}  // namespace

TimeGrid TimeGrid::uniform(int r) {
  if (r < 2) throw std::invalid_argument("a time grid needs at least two points");
  return TimeGrid{r};
}

Eigen::VectorXd TimeGrid::times() const {
  Eigen::VectorXd t(r);
  for (int j = 0; j < r; ++j) t[j] = time(j);
  return t;
}

void require_outside_cut_locus(const Manifold& m, const Point& p, const Point& x) {
  if (!m.is_spherical()) return;
  const double dist = distance(m, p, x);
  if (dist > std::numbers::pi - kSphereCutLocusMargin) {
    std::ostringstream msg;
    msg << "points at distance " << dist << " are on or near each other's cut locus";
    throw CutLocusError(msg.str());
  }
}

Tangent transport_along(const DiscreteCurve& c, int j_from, int j_to, const Tangent& t) {
  if (j_from < 0 || j_to < 0 || j_from >= c.size() || j_to >= c.size()) {
    throw std::out_of_range("curve index out of range");
  }
  Eigen::VectorXd v = t.vec;
  const int step = j_to >= j_from ? 1 : -1;
  for (int j = j_from; j != j_to; j += step) {
    const Point a = c.point(j);
    const Point b = c.point(j + step);
    require_outside_cut_locus(c.manifold, a, b);
    v = transport_columns(c.manifold, a, b, v);
  }
  return {c.point(j_to), v};
}

Development::Development(DiscreteCurve base_curve, Point b, Eigen::MatrixXd frame)
    : curve_(std::move(base_curve)), base_(std::move(b)), frame_(std::move(frame)) {
  const Manifold& m = curve_.manifold;
  const int r = curve_.size();
  if (r < 1) throw std::invalid_argument("cannot develop an empty curve");
  frames_.reserve(static_cast<std::size_t>(r));
  unrolled_.resize(m.d, r);

  const Point g0 = curve_.point(0);
  require_outside_cut_locus(m, base_, g0);
  unrolled_.col(0) = frame_coords(m, base_, frame_, log_map(m, base_, g0).vec);
  frames_.push_back(transport_frame(m, base_, g0, frame_));

  for (int j = 0; j + 1 < r; ++j) {
    const Point gj = curve_.point(j);
    const Point gn = curve_.point(j + 1);
    require_outside_cut_locus(m, gj, gn);
    const Eigen::VectorXd step = log_map(m, gj, gn).vec;
    unrolled_.col(j + 1) = unrolled_.col(j) + coords_in(m, gj, frames_.back(), step);
    frames_.push_back(transport_frame(m, gj, gn, frames_.back()));
  }
}

Development Development::roll(const Manifold& m, const Point& b, const Eigen::MatrixXd& frame,
                              const Eigen::MatrixXd& coords) {
  if (coords.rows() != m.d) throw std::invalid_argument("flat coordinates must have d rows");
  const int r = static_cast<int>(coords.cols());
  Development dev;
  dev.base_ = b;
  dev.frame_ = frame;
  dev.unrolled_ = coords;
  dev.curve_.manifold = m;
  dev.curve_.points.resize(m.q, r);
  dev.frames_.reserve(static_cast<std::size_t>(r));

  Point current = exp_map(m, {b, frame * coords.col(0)});
  require_outside_cut_locus(m, b, current);
  dev.curve_.points.col(0) = current;
  dev.frames_.push_back(transport_frame(m, b, current, frame));
  for (int j = 0; j + 1 < r; ++j) {
    const Eigen::VectorXd step = dev.frames_.back() * (coords.col(j + 1) - coords.col(j));
    const Point next = exp_map(m, {current, step});
    require_outside_cut_locus(m, current, next);
    dev.curve_.points.col(j + 1) = next;
    dev.frames_.push_back(transport_frame(m, current, next, dev.frames_.back()));
    current = next;
  }
  return dev;
}

Eigen::MatrixXd Development::unwrap(const DiscreteCurve& x) const {
  require_same_manifold(x, curve_);
  const Manifold& m = curve_.manifold;
  Eigen::MatrixXd out(m.d, curve_.size());
  for (int j = 0; j < curve_.size(); ++j) {
    const Point gj = curve_.point(j);
    const Point xj = x.point(j);
    if (xj == gj) {
      out.col(j) = unrolled_.col(j);
      continue;
    }
    require_outside_cut_locus(m, gj, xj);
    out.col(j) = unrolled_.col(j) + coords_in(m, gj, frames_[static_cast<std::size_t>(j)], log_map(m, gj, xj).vec);
  }
  return out;
}

DiscreteCurve Development::wrap(const Eigen::MatrixXd& coords, InjectivityCheck check) const {
  const Manifold& m = curve_.manifold;
  if (coords.rows() != m.d || coords.cols() != curve_.size()) {
    throw std::invalid_argument("flat curve does not match the base curve's dimensions");
  }
  DiscreteCurve out{m, Eigen::MatrixXd(m.q, curve_.size())};
  for (int j = 0; j < curve_.size(); ++j) {
    const Eigen::VectorXd deviation = coords.col(j) - unrolled_.col(j);
    // Transported frames are orthonormal, so the tangent norm equals the flat norm.
    if (check == InjectivityCheck::enforce && m.is_spherical() &&
        deviation.norm() > std::numbers::pi - kSphereCutLocusMargin) {
      std::ostringstream msg;
      msg << "flat deviation of norm " << deviation.norm() << " at index " << j
          << " exceeds the injectivity radius of the sphere";
      throw CutLocusError(msg.str());
    }
    const Point gj = curve_.point(j);
    out.points.col(j) = exp_map(m, {gj, frames_[static_cast<std::size_t>(j)] * deviation});
  }
  return out;
}

FlatCurve unroll(const DiscreteCurve& c, const Point& b, const Eigen::MatrixXd& frame) {
  Development dev(c, b, frame);
  return {b, frame, dev.unrolled()};
}

DiscreteCurve roll(const FlatCurve& f, const Manifold& m) {
  return Development::roll(m, f.base, f.frame, f.coords).curve();
}

FlatCurve unwrap(const DiscreteCurve& x, const DiscreteCurve& g, const Point& b, const Eigen::MatrixXd& frame) {
  Development dev(g, b, frame);
  return {b, frame, dev.unwrap(x)};
}

DiscreteCurve wrap(const FlatCurve& y, const DiscreteCurve& g) {
  Development dev(g, y.base, y.frame);
  return dev.wrap(y.coords);
}

}  // namespace rgp
