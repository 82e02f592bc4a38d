#include "rgp/estimate.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "rgp/errors.hpp"
#include "rgp/optimize.hpp"

namespace rgp {

namespace {

struct Problem {
  Manifold manifold;
  Eigen::MatrixXd phi;
  Eigen::MatrixXd phi_minus;
};

Problem make_problem(const std::vector<DiscreteCurve>& data, const BasisSpec& spec, const Point& b,
                     const Eigen::MatrixXd& frame) {
  if (data.empty()) throw std::invalid_argument("cannot fit an empty sample");
  const Manifold& m = data.front().manifold;
  const int r = data.front().size();
  for (const DiscreteCurve& c : data) {
    if (!(c.manifold == m) || c.size() != r) throw std::invalid_argument("curves must share manifold and time grid");
  }
  if (b.size() != m.q) throw std::invalid_argument("base point has the wrong dimension");
  if (frame.rows() != m.q || frame.cols() != m.d) throw std::invalid_argument("frame must be q x d");
  if (m.d > spec.k) throw InvalidSpecError("the basis needs k >= d");
  Problem p{m, bspline_matrix(spec, TimeGrid::uniform(r)), {}};
  p.phi_minus = right_inverse(p.phi);
  return p;
}

std::vector<Eigen::MatrixXd> coefficients(const Development& dev, const std::vector<DiscreteCurve>& data,
                                          const Eigen::MatrixXd& phi_minus) {
  std::vector<Eigen::MatrixXd> W;
  W.reserve(data.size());
  for (const DiscreteCurve& x : data) W.push_back(dev.unwrap(x) * phi_minus);
  return W;
}

std::vector<Eigen::MatrixXd> residuals(const std::vector<Eigen::MatrixXd>& W, const Eigen::MatrixXd& M) {
  std::vector<Eigen::MatrixXd> R;
  R.reserve(W.size());
  for (const Eigen::MatrixXd& w : W) R.push_back(w - M);
  return R;
}

Eigen::MatrixXd reshape(const Eigen::VectorXd& x, int d, int k) {
  return Eigen::Map<const Eigen::MatrixXd>(x.data(), d, k);
}

Eigen::VectorXd flatten(const Eigen::MatrixXd& M) { return Eigen::Map<const Eigen::VectorXd>(M.data(), M.size()); }

// sum_i ||left (H(X_i; Gamma(M)) Phi^- - M) right||_F^2; identity weights when left/right are null.
double trace_objective(const Problem& p, const std::vector<DiscreteCurve>& data, const Eigen::MatrixXd& M,
                       const Point& b, const Eigen::MatrixXd& frame, const Eigen::MatrixXd* left,
                       const Eigen::MatrixXd* right) {
  const Development dev = Development::roll(p.manifold, b, frame, M * p.phi);
  double total = 0.0;
  for (const DiscreteCurve& x : data) {
    Eigen::MatrixXd R = dev.unwrap(x) * p.phi_minus - M;
    if (left) R = (*left) * R;
    if (right) R = R * (*right);
    total += R.squaredNorm();
  }
  return total;
}

Eigen::MatrixXd minimize_trace(const Problem& p, const std::vector<DiscreteCurve>& data, const Eigen::MatrixXd& M0,
                               const Point& b, const Eigen::MatrixXd& frame, const FitConfig& cfg,
                               const Eigen::MatrixXd* left, const Eigen::MatrixXd* right, int* iterations) {
  const int d = static_cast<int>(M0.rows());
  const int k = static_cast<int>(M0.cols());
  const Objective f = [&](const Eigen::VectorXd& x) {
    return trace_objective(p, data, reshape(x, d, k), b, frame, left, right);
  };
  const BfgsResult res = minimize_bfgs(f, flatten(M0), {cfg.optimizer_max_iter, cfg.optimizer_tol, cfg.fd_step});
  if (iterations) *iterations = res.iterations;
  return reshape(res.x, d, k);
}

// Covariances and likelihood for a given mean matrix, unwrapping against Gamma(M).
FitResult finish_fit(const Problem& p, const std::vector<DiscreteCurve>& data, const Eigen::MatrixXd& M,
                     const Point& b, const Eigen::MatrixXd& frame, const FitConfig& cfg, FitMethod method,
                     const Eigen::MatrixXd* v_init = nullptr) {
  const Development dev = Development::roll(p.manifold, b, frame, M * p.phi);
  FitResult out;
  out.method = method;
  out.gamma_hat = dev.curve();
  out.W = coefficients(dev, data, p.phi_minus);
  const FlipFlopResult ff = flipflop(residuals(out.W, M), cfg, v_init);
  out.params = {M, ff.U, ff.V};
  out.loglik = mn_loglik(out.params, out.W);
  return out;
}

void require_pd(const Eigen::MatrixXd& A, const char* name) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (!(hi > 0.0) || lo < 1e-12 * hi) {
    std::ostringstream msg;
    msg << "flip-flop produced a degenerate " << name << " (eigenvalues in [" << lo << ", " << hi << "])";
    throw DegenerateError(msg.str());
  }
}

double relative_change(const Eigen::MatrixXd& now, const Eigen::MatrixXd& before) {
  return (now - before).norm() / now.norm();
}

}  // namespace

std::string_view to_string(FitMethod method) {
  switch (method) {
    case FitMethod::fre:
      return "fre";
    case FitMethod::ls:
      return "ls";
    case FitMethod::mle:
      return "mle";
  }
  return "?";
}

FitMethod fit_method_from_string(std::string_view name) {
  if (name == "fre") return FitMethod::fre;
  if (name == "ls") return FitMethod::ls;
  if (name == "mle") return FitMethod::mle;
  throw std::invalid_argument("unknown fit method '" + std::string(name) + "' (expected fre, ls or mle)");
}

void FitConfig::validate() const {
  if (flipflop_max_iter < 1 || optimizer_max_iter < 1 || mle_max_outer < 1) {
    throw std::invalid_argument("iteration limits must be positive");
  }
  if (!(flipflop_tol > 0.0) || !(optimizer_tol > 0.0) || !(fd_step > 0.0)) {
    throw std::invalid_argument("tolerances and the finite-difference step must be positive");
  }
  frechet.validate();
}

double mn_loglik(const MNParams& params, const std::vector<Eigen::MatrixXd>& W) {
  const Eigen::Index d = params.U.rows();
  const Eigen::Index k = params.V.rows();
  const Eigen::LLT<Eigen::MatrixXd> lu(params.U);
  const Eigen::LLT<Eigen::MatrixXd> lv(params.V);
  if (lu.info() != Eigen::Success) throw NotPositiveDefiniteError("U_w is not positive definite");
  if (lv.info() != Eigen::Success) throw NotPositiveDefiniteError("V_w is not positive definite");
  const double logdet_u = 2.0 * lu.matrixL().toDenseMatrix().diagonal().array().log().sum();
  const double logdet_v = 2.0 * lv.matrixL().toDenseMatrix().diagonal().array().log().sum();
  const double n = static_cast<double>(W.size());

  double quad = 0.0;
  for (const Eigen::MatrixXd& w : W) {
    if (w.rows() != d || w.cols() != k) throw std::invalid_argument("coefficient matrix has the wrong shape");
    // L_U^{-1} R L_V^{-T}
    const Eigen::MatrixXd a = lu.matrixL().solve(w - params.M);
    const Eigen::MatrixXd c = lv.matrixL().solve(a.transpose());
    quad += c.squaredNorm();
  }
  return -0.5 * n * static_cast<double>(k) * logdet_u - 0.5 * n * static_cast<double>(d) * logdet_v - 0.5 * quad;
}

FlipFlopResult flipflop(const std::vector<Eigen::MatrixXd>& residuals, const FitConfig& cfg,
                        const Eigen::MatrixXd* v_init) {
  cfg.validate();
  if (residuals.empty()) throw std::invalid_argument("flip-flop needs at least one residual matrix");
  const Eigen::Index d = residuals.front().rows();
  const Eigen::Index k = residuals.front().cols();
  const Eigen::Index n = static_cast<Eigen::Index>(residuals.size());
  if (n * k <= d || n * d <= k) {
    std::ostringstream msg;
    msg << "too few samples for covariance estimation (n = " << n << ", d = " << d << ", k = " << k << ")";
    throw DegenerateError(msg.str());
  }

  FlipFlopResult out;
  out.U = Eigen::MatrixXd::Identity(d, d);
  out.V = v_init ? *v_init : Eigen::MatrixXd::Identity(k, k);
  const MNParams zero_mean{Eigen::MatrixXd::Zero(d, k), out.U, out.V};

  for (int sweep = 1; sweep <= cfg.flipflop_max_iter; ++sweep) {
    const Eigen::LLT<Eigen::MatrixXd> lv(out.V);
    Eigen::MatrixXd U = Eigen::MatrixXd::Zero(d, d);
    for (const Eigen::MatrixXd& R : residuals) U.noalias() += R * lv.solve(R.transpose());
    U /= static_cast<double>(n * k);
    U = 0.5 * (U + U.transpose()).eval();
    require_pd(U, "U_w");

    const Eigen::LLT<Eigen::MatrixXd> lu(U);
    Eigen::MatrixXd V = Eigen::MatrixXd::Zero(k, k);
    for (const Eigen::MatrixXd& R : residuals) V.noalias() += R.transpose() * lu.solve(R);
    V /= static_cast<double>(n * d);
    V = 0.5 * (V + V.transpose()).eval();
    require_pd(V, "V_w");

    const double c = static_cast<double>(d) / U.trace();
    U *= c;
    V /= c;

    const double change = std::max(relative_change(U, out.U), relative_change(V, out.V));
    out.U = U;
    out.V = V;
    out.sweeps = sweep;
    out.loglik.push_back(mn_loglik({zero_mean.M, U, V}, residuals));
    if (change < cfg.flipflop_tol) return out;
  }
  throw NoConvergenceError("flip-flop did not converge in " + std::to_string(cfg.flipflop_max_iter) + " sweeps");
}

FreMean fre_mean(const std::vector<DiscreteCurve>& data, const BasisSpec& spec, const Point& b,
                 const Eigen::MatrixXd& frame, const FitConfig& cfg) {
  cfg.validate();
  const Problem p = make_problem(data, spec, b, frame);
  FreMean out;
  out.gamma_hat = frechet_mean_curve(data, cfg.frechet);
  const Development dev(out.gamma_hat, b, frame);
  out.M = dev.unrolled() * p.phi_minus;
  out.W = coefficients(dev, data, p.phi_minus);
  return out;
}

FitResult fit_fre(const std::vector<DiscreteCurve>& data, const BasisSpec& spec, const Point& b,
                  const Eigen::MatrixXd& frame, const FitConfig& cfg) {
  FreMean mean = fre_mean(data, spec, b, frame, cfg);
  const FlipFlopResult ff = flipflop(residuals(mean.W, mean.M), cfg);
  FitResult out;
  out.method = FitMethod::fre;
  out.params = {mean.M, ff.U, ff.V};
  out.gamma_hat = std::move(mean.gamma_hat);
  out.W = std::move(mean.W);
  out.loglik = mn_loglik(out.params, out.W);
  out.iterations = ff.sweeps;
  return out;
}

double ls_objective(const std::vector<DiscreteCurve>& data, const Eigen::MatrixXd& M, const BasisSpec& spec,
                    const Point& b, const Eigen::MatrixXd& frame) {
  const Problem p = make_problem(data, spec, b, frame);
  if (M.rows() != p.manifold.d || M.cols() != spec.k) throw std::invalid_argument("mean matrix must be d x k");
  return trace_objective(p, data, M, b, frame, nullptr, nullptr);
}

FitResult fit_ls(const std::vector<DiscreteCurve>& data, const BasisSpec& spec, const Point& b,
                 const Eigen::MatrixXd& frame, const FitConfig& cfg) {
  const Problem p = make_problem(data, spec, b, frame);
  const FreMean init = fre_mean(data, spec, b, frame, cfg);
  int iterations = 0;
  const Eigen::MatrixXd M = minimize_trace(p, data, init.M, b, frame, cfg, nullptr, nullptr, &iterations);
  FitResult out = finish_fit(p, data, M, b, frame, cfg, FitMethod::ls);
  out.iterations = iterations;
  return out;
}

FitResult fit_mle(const std::vector<DiscreteCurve>& data, const BasisSpec& spec, const Point& b,
                  const Eigen::MatrixXd& frame, const FitConfig& cfg) {
  const Problem p = make_problem(data, spec, b, frame);
  const FreMean init = fre_mean(data, spec, b, frame, cfg);
  FitResult current = finish_fit(p, data, init.M, b, frame, cfg, FitMethod::mle);

  for (int outer = 1; outer <= cfg.mle_max_outer; ++outer) {
    const Eigen::LLT<Eigen::MatrixXd> lu(current.params.U);
    const Eigen::LLT<Eigen::MatrixXd> lv(current.params.V);
    const Eigen::MatrixXd left = lu.matrixL().solve(Eigen::MatrixXd::Identity(p.manifold.d, p.manifold.d));
    const Eigen::MatrixXd right =
        lv.matrixL().solve(Eigen::MatrixXd::Identity(spec.k, spec.k)).transpose();  // L_V^{-T}

    const Eigen::MatrixXd M = minimize_trace(p, data, current.params.M, b, frame, cfg, &left, &right, nullptr);
    FitResult next = finish_fit(p, data, M, b, frame, cfg, FitMethod::mle, &current.params.V);
    next.iterations = outer;

    const double step = (M - current.params.M).norm() / std::max(1.0, current.params.M.norm());
    const double gain = next.loglik - current.loglik;
    if (gain < -1e-6 * (1.0 + std::abs(current.loglik))) {
      // Keep the better point; the outer loop is a block ascent and should not go downhill.
      current.iterations = outer;
      return current;
    }
    current = std::move(next);
    if (step < cfg.optimizer_tol || gain <= 1e-9 * (1.0 + std::abs(current.loglik))) return current;
  }
  return current;
}

FitResult fit(const std::vector<DiscreteCurve>& data, const BasisSpec& spec, const Point& b,
              const Eigen::MatrixXd& frame, const FitConfig& cfg) {
  switch (cfg.method) {
    case FitMethod::fre:
      return fit_fre(data, spec, b, frame, cfg);
    case FitMethod::ls:
      return fit_ls(data, spec, b, frame, cfg);
    case FitMethod::mle:
      return fit_mle(data, spec, b, frame, cfg);
  }
  throw std::invalid_argument("unknown fit method");
}

}  // namespace rgp
