#include "rgp/model.hpp"

#include <array>
#include <sstream>
#include <stdexcept>

#include "rgp/errors.hpp"

namespace rgp {

namespace {

constexpr int kDegree = BasisSpec::order - 1;

void require_symmetric_pd(const Eigen::MatrixXd& A, const char* name) {
  if (A.rows() != A.cols()) throw std::invalid_argument(std::string(name) + " must be square");
  if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, A.cwiseAbs().maxCoeff())) {
    throw std::invalid_argument(std::string(name) + " must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Eigen::EigenvaluesOnly);
  if (!(es.eigenvalues().minCoeff() > 0.0)) {
    throw NotPositiveDefiniteError(std::string(name) + " is not positive definite");
  }
}

// Knot span index i with knots[i] <= t < knots[i + 1]; the last span for t = 1.
int find_span(const Eigen::VectorXd& knots, int n_basis, double t) {
  if (t >= knots[n_basis]) return n_basis - 1;
  if (t <= knots[kDegree]) return kDegree;
  int low = kDegree;
  int high = n_basis;
  int mid = (low + high) / 2;
  while (t < knots[mid] || t >= knots[mid + 1]) {
    if (t < knots[mid]) {
      high = mid;
    } else {
      low = mid;
    }
    mid = (low + high) / 2;
  }
  return mid;
}

}  // namespace

void BasisSpec::validate() const {
  if (k < order) {
    throw InvalidSpecError("a cubic B-spline basis needs at least 4 functions (k = " + std::to_string(k) + ")");
  }
}

Eigen::VectorXd BasisSpec::knots() const {
  validate();
  Eigen::VectorXd u(k + order);
  const int interior = k - order;
  for (int i = 0; i < order; ++i) {
    u[i] = 0.0;
    u[k + i] = 1.0;
  }
  for (int i = 1; i <= interior; ++i) u[kDegree + i] = static_cast<double>(i) / static_cast<double>(interior + 1);
  return u;
}

Eigen::VectorXd bspline_values(const BasisSpec& spec, double t) {
  if (t < 0.0 || t > 1.0) throw std::invalid_argument("B-spline argument outside [0, 1]");
  const Eigen::VectorXd u = spec.knots();
  const int span = find_span(u, spec.k, t);

  std::array<double, BasisSpec::order> N{};
  std::array<double, BasisSpec::order> left{};
  std::array<double, BasisSpec::order> right{};
  N[0] = 1.0;
  for (int j = 1; j <= kDegree; ++j) {
    left[j] = t - u[span + 1 - j];
    right[j] = u[span + j] - t;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double temp = N[r] / (right[r + 1] + left[j - r]);
      N[r] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    N[j] = saved;
  }

  Eigen::VectorXd values = Eigen::VectorXd::Zero(spec.k);
  for (int j = 0; j <= kDegree; ++j) values[span - kDegree + j] = N[j];
  return values;
}

Eigen::MatrixXd bspline_matrix(const BasisSpec& spec, const TimeGrid& grid) {
  spec.validate();
  if (grid.r <= spec.k) {
    throw InvalidSpecError("need more time points than basis functions (r = " + std::to_string(grid.r) +
                           ", k = " + std::to_string(spec.k) + ")");
  }
  Eigen::MatrixXd phi(spec.k, grid.r);
  for (int j = 0; j < grid.r; ++j) phi.col(j) = bspline_values(spec, grid.time(j));
  return phi;
}

Eigen::MatrixXd right_inverse(const Eigen::MatrixXd& phi) {
  if (phi.rows() > phi.cols()) throw RankDeficientError("basis matrix has more rows than columns");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(phi);
  const Eigen::VectorXd& sv = svd.singularValues();
  if (sv.size() == 0 || sv[sv.size() - 1] < 1e-10 * sv[0]) {
    throw RankDeficientError("basis matrix does not have full row rank");
  }
  const Eigen::MatrixXd gram = phi * phi.transpose();
  const Eigen::MatrixXd solved = gram.llt().solve(phi);  // (Phi Phi^T)^{-1} Phi
  return solved.transpose();
}

void MNParams::validate() const {
  if (U.rows() != M.rows()) throw std::invalid_argument("row covariance does not match the mean's rows");
  if (V.rows() != M.cols()) throw std::invalid_argument("column covariance does not match the mean's columns");
  require_symmetric_pd(U, "U_w");
  require_symmetric_pd(V, "V_w");
}

Eigen::MatrixXd sample_mn(const MNParams& params, Rng& rng) {
  const Eigen::MatrixXd root_u = sym_funcm(SymFunc::sqrt, params.U);
  const Eigen::MatrixXd root_v = sym_funcm(SymFunc::sqrt, params.V);
  const Eigen::MatrixXd g = rng.standard_normal(params.d(), params.k());
  return params.M + root_u * g * root_v;
}

void RGPModel::validate() const {
  params.validate();
  basis.validate();
  if (params.d() != manifold.d) throw std::invalid_argument("mean matrix must have d rows");
  if (params.k() != basis.k) throw std::invalid_argument("mean matrix must have k columns");
  if (params.d() > basis.k) throw InvalidSpecError("the basis needs k >= max(4, d)");
  validate_point(manifold, base, 1e-10);
  if (frame.rows() != manifold.q || frame.cols() != manifold.d) throw std::invalid_argument("frame must be q x d");
  const Eigen::MatrixXd gram = frame_gram(manifold, base, frame);
  if ((gram - Eigen::MatrixXd::Identity(manifold.d, manifold.d)).cwiseAbs().maxCoeff() > 1e-10) {
    throw std::invalid_argument("frame is not orthonormal at the base point");
  }
  TimeGrid::uniform(grid.r);
}

DiscreteCurve mean_curve(const RGPModel& model) {
  model.validate();
  const Eigen::MatrixXd phi = bspline_matrix(model.basis, model.grid);
  return Development::roll(model.manifold, model.base, model.frame, model.params.M * phi).curve();
}

Simulation simulate(const RGPModel& model, int n, const Rng& rng, const SimulateOptions& options) {
  if (n < 0) throw std::invalid_argument("sample size must be non-negative");
  model.validate();
  const Eigen::MatrixXd phi = bspline_matrix(model.basis, model.grid);
  const Development mean = Development::roll(model.manifold, model.base, model.frame, model.params.M * phi);

  Simulation sim;
  sim.curves.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Rng stream = rng.substream(static_cast<std::uint64_t>(i));
    Eigen::MatrixXd w = sample_mn(model.params, stream);
    Eigen::MatrixXd z = w * phi;
    sim.curves.push_back(mean.wrap(z, options.injectivity));
    sim.Z.push_back(std::move(z));
    sim.W.push_back(std::move(w));
  }
  return sim;
}

Eigen::MatrixXd unwrap_coords(const DiscreteCurve& x, const DiscreteCurve& g, const Point& b,
                              const Eigen::MatrixXd& frame) {
  return unwrap(x, g, b, frame).coords;
}

}  // namespace rgp
