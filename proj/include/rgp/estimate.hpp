#pragma once

#include <string_view>
#include <vector>

#include "rgp/curves.hpp"
#include "rgp/frechet.hpp"
#include "rgp/model.hpp"

namespace rgp {

enum class FitMethod { fre, ls, mle };

std::string_view to_string(FitMethod method);
// Throws std::invalid_argument for unknown names.
FitMethod fit_method_from_string(std::string_view name);

struct FitConfig {
  FitMethod method = FitMethod::fre;
  int flipflop_max_iter = 100;
  double flipflop_tol = 1e-9;  // relative Frobenius change of both factors
  int optimizer_max_iter = 500;
  double optimizer_tol = 1e-8;
  double fd_step = 1e-5;
  int mle_max_outer = 50;
  FrechetConfig frechet;

  void validate() const;
};

struct FitResult {
  MNParams params;
  DiscreteCurve gamma_hat;  // the base curve used for unwrapping
  double loglik = 0.0;
  int iterations = 0;
  FitMethod method = FitMethod::fre;
  std::vector<Eigen::MatrixXd> W;  // H(X_i; gamma_hat) Phi^-, one d x k matrix per curve
};

// Matrix-normal log-likelihood without the constant:
// -(nk/2) log|U| - (nd/2) log|V| - 1/2 sum_i tr(U^-1 (W_i - M) V^-1 (W_i - M)^T).
double mn_loglik(const MNParams& params, const std::vector<Eigen::MatrixXd>& W);

struct FlipFlopResult {
  Eigen::MatrixXd U;  // trace U = d
  Eigen::MatrixXd V;
  int sweeps = 0;
  std::vector<double> loglik;  // after every sweep, evaluated at mean zero
};

// Alternating covariance updates for zero-mean residuals, starting from V = I
// unless v_init is given.
FlipFlopResult flipflop(const std::vector<Eigen::MatrixXd>& residuals, const FitConfig& cfg,
                        const Eigen::MatrixXd* v_init = nullptr);

// Closed-form mean part of the Frechet-based fit, without covariances.
struct FreMean {
  DiscreteCurve gamma_hat;
  Eigen::MatrixXd M;               // H(gamma_hat; gamma_hat) Phi^-
  std::vector<Eigen::MatrixXd> W;  // H(X_i; gamma_hat) Phi^-
};

FreMean fre_mean(const std::vector<DiscreteCurve>& data, const BasisSpec& spec, const Point& b,
                 const Eigen::MatrixXd& frame, const FitConfig& cfg = {});

FitResult fit_fre(const std::vector<DiscreteCurve>& data, const BasisSpec& spec, const Point& b,
                  const Eigen::MatrixXd& frame, const FitConfig& cfg = {});

// sum_i ||H(X_i; Gamma(M)) Phi^- - M||_F^2 with Gamma(M) the rolling of M Phi.
double ls_objective(const std::vector<DiscreteCurve>& data, const Eigen::MatrixXd& M, const BasisSpec& spec,
                    const Point& b, const Eigen::MatrixXd& frame);

FitResult fit_ls(const std::vector<DiscreteCurve>& data, const BasisSpec& spec, const Point& b,
                 const Eigen::MatrixXd& frame, const FitConfig& cfg = {});

FitResult fit_mle(const std::vector<DiscreteCurve>& data, const BasisSpec& spec, const Point& b,
                  const Eigen::MatrixXd& frame, const FitConfig& cfg = {});

// Dispatches on cfg.method.
FitResult fit(const std::vector<DiscreteCurve>& data, const BasisSpec& spec, const Point& b,
              const Eigen::MatrixXd& frame, const FitConfig& cfg = {});

}  // namespace rgp
