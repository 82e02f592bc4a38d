#include "rgp/frechet.hpp"

#include <sstream>
#include <stdexcept>

#include "rgp/errors.hpp"

namespace rgp {

namespace {

Eigen::VectorXd mean_log(const Manifold& m, const Point& p, const std::vector<Point>& pts) {
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(p.size());
  for (const Point& x : pts) acc += log_map(m, p, x).vec;
  return acc / static_cast<double>(pts.size());
}

}  // namespace

void FrechetConfig::validate() const {
  if (max_iter < 1) throw std::invalid_argument("FrechetConfig.max_iter must be positive");
  if (!(tol > 0.0)) throw std::invalid_argument("FrechetConfig.tol must be positive");
  if (!(step > 0.0 && step <= 1.0)) throw std::invalid_argument("FrechetConfig.step must lie in (0, 1]");
}

double frechet_functional(const Manifold& m, const Point& p, const std::vector<Point>& pts) {
  if (pts.empty()) throw std::invalid_argument("frechet_functional needs at least one point");
  double acc = 0.0;
  for (const Point& x : pts) {
    const double dist = distance(m, p, x);
    acc += dist * dist;
  }
  return acc / static_cast<double>(pts.size());
}

Point frechet_mean(const Manifold& m, const std::vector<Point>& pts, const FrechetConfig& cfg, FrechetTrace* trace) {
  if (pts.empty()) throw std::invalid_argument("frechet_mean needs at least one point");
  return frechet_mean(m, pts, pts.front(), cfg, trace);
}

Point frechet_mean(const Manifold& m, const std::vector<Point>& pts, const Point& init, const FrechetConfig& cfg,
                   FrechetTrace* trace) {
  cfg.validate();
  if (pts.empty()) throw std::invalid_argument("frechet_mean needs at least one point");
  if (m.kind == ManifoldKind::euclidean) {
    Point mean = Point::Zero(m.q);
    for (const Point& x : pts) mean += x;
    mean /= static_cast<double>(pts.size());
    if (trace) {
      trace->iterations = 1;
      trace->functional = {frechet_functional(m, init, pts), frechet_functional(m, mean, pts)};
    }
    return mean;
  }

  Point p = init;
  double value = frechet_functional(m, p, pts);
  if (trace) {
    trace->iterations = 0;
    trace->functional = {value};
  }
  for (int it = 0; it < cfg.max_iter; ++it) {
    const Eigen::VectorXd grad = mean_log(m, p, pts);
    if (norm(m, p, grad) <= cfg.tol) {
      if (trace) trace->iterations = it;
      return p;
    }
    double step = cfg.step;
    bool accepted = false;
    for (int halving = 0; halving < 60; ++halving) {
      const Point candidate = exp_map(m, {p, step * grad});
      const double candidate_value = frechet_functional(m, candidate, pts);
      if (candidate_value <= value + 1e-12 * std::max(1.0, value)) {
        p = candidate;
        value = candidate_value;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (trace && accepted) trace->functional.push_back(value);
    if (!accepted) break;
  }
  const double residual = norm(m, p, mean_log(m, p, pts));
  if (residual <= cfg.tol) {
    if (trace) trace->iterations = cfg.max_iter;
    return p;
  }
  std::ostringstream msg;
  msg << "Frechet mean did not converge after " << cfg.max_iter << " iterations (gradient norm " << residual << ")";
  throw NoConvergenceError(msg.str());
}

DiscreteCurve frechet_mean_curve(const std::vector<DiscreteCurve>& samples, const FrechetConfig& cfg) {
  if (samples.empty()) throw std::invalid_argument("frechet_mean_curve needs at least one curve");
  const Manifold& m = samples.front().manifold;
  const int r = samples.front().size();
  for (const auto& c : samples) {
    if (!(c.manifold == m) || c.size() != r) throw std::invalid_argument("samples must share manifold and time grid");
  }
  if (samples.size() == 1) return samples.front();

  DiscreteCurve out{m, Eigen::MatrixXd(m.q, r)};
  std::vector<Point> pts(samples.size());
  for (int j = 0; j < r; ++j) {
    for (std::size_t i = 0; i < samples.size(); ++i) pts[i] = samples[i].point(j);
    const Point init = j == 0 ? pts.front() : Point(out.points.col(j - 1));
    out.points.col(j) = frechet_mean(m, pts, init, cfg);
  }
  return out;
}

}  // namespace rgp
