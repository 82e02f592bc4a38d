#include "rgp/inference.hpp"

#include <sstream>
#include <stdexcept>

#include "rgp/errors.hpp"

namespace rgp {

namespace {

Eigen::LLT<Eigen::MatrixXd> factor(const Eigen::MatrixXd& A, const char* name) {
  Eigen::LLT<Eigen::MatrixXd> llt(A);
  if (llt.info() != Eigen::Success) throw NotPositiveDefiniteError(std::string("pooled ") + name + " is not positive definite");
  return llt;
}

// Both groups unwrapped against one reference curve; covariances per group.
std::pair<MNParams, MNParams> pooled_reference_fits(const std::vector<DiscreteCurve>& s1,
                                                    const std::vector<DiscreteCurve>& s2, const BasisSpec& spec,
                                                    const Point& b, const Eigen::MatrixXd& frame,
                                                    const FitConfig& cfg) {
  std::vector<DiscreteCurve> all = s1;
  all.insert(all.end(), s2.begin(), s2.end());
  const FreMean pooled = fre_mean(all, spec, b, frame, cfg);
  const std::size_t n1 = s1.size();
  auto group = [&](std::size_t begin, std::size_t end) {
    const std::vector<Eigen::MatrixXd> W(pooled.W.begin() + static_cast<std::ptrdiff_t>(begin),
                                         pooled.W.begin() + static_cast<std::ptrdiff_t>(end));
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(W.front().rows(), W.front().cols());
    for (const Eigen::MatrixXd& w : W) M += w;
    M /= static_cast<double>(W.size());
    std::vector<Eigen::MatrixXd> R;
    for (const Eigen::MatrixXd& w : W) R.push_back(w - M);
    const FlipFlopResult ff = flipflop(R, cfg);
    return MNParams{M, ff.U, ff.V};
  };
  return {group(0, n1), group(n1, all.size())};
}

}  // namespace

void TestConfig::validate() const {
  if (R < 1) throw std::invalid_argument("the number of resamples must be at least 1");
  fit.validate();
}

double hotelling_stat(const MNParams& fit1, const MNParams& fit2, int n1, int n2) {
  if (fit1.M.rows() != fit2.M.rows() || fit1.M.cols() != fit2.M.cols()) {
    throw std::invalid_argument("fits must share d and k");
  }
  if (n1 < 1 || n2 < 1 || n1 + n2 < 3) throw std::invalid_argument("group sizes too small for pooling");
  const double w1 = n1 - 1.0;
  const double w2 = n2 - 1.0;
  const double denom = n1 + n2 - 2.0;
  const Eigen::MatrixXd U = (w1 * fit1.U + w2 * fit2.U) / denom;
  const Eigen::MatrixXd V = (w1 * fit1.V + w2 * fit2.V) / denom;
  const Eigen::MatrixXd D = fit1.M - fit2.M;
  const auto lu = factor(U, "U_w");
  const auto lv = factor(V, "V_w");
  return (D.transpose() * lu.solve(D) * lv.solve(Eigen::MatrixXd::Identity(V.rows(), V.cols()))).trace();
}

double hotelling_stat(const FitResult& fit1, const FitResult& fit2, int n1, int n2) {
  return hotelling_stat(fit1.params, fit2.params, n1, n2);
}

double permutation_p_value(double observed, const std::vector<double>& resampled) {
  std::size_t exceed = 0;
  for (double j : resampled) {
    if (j > observed) ++exceed;
  }
  return (1.0 + static_cast<double>(exceed)) / (1.0 + static_cast<double>(resampled.size()));
}

double two_sample_statistic(const std::vector<DiscreteCurve>& s1, const std::vector<DiscreteCurve>& s2,
                            const BasisSpec& spec, const Point& b, const Eigen::MatrixXd& frame,
                            const TestConfig& cfg) {
  const int n1 = static_cast<int>(s1.size());
  const int n2 = static_cast<int>(s2.size());
  if (cfg.reference == ReferenceCurve::pooled) {
    const auto [f1, f2] = pooled_reference_fits(s1, s2, spec, b, frame, cfg.fit);
    return hotelling_stat(f1, f2, n1, n2);
  }
  const FitResult f1 = fit(s1, spec, b, frame, cfg.fit);
  const FitResult f2 = fit(s2, spec, b, frame, cfg.fit);
  return hotelling_stat(f1, f2, n1, n2);
}

TestResult permutation_test(const std::vector<DiscreteCurve>& s1, const std::vector<DiscreteCurve>& s2,
                            const BasisSpec& spec, const Point& b, const Eigen::MatrixXd& frame,
                            const TestConfig& cfg) {
  cfg.validate();
  if (s1.empty() || s2.empty()) throw std::invalid_argument("both groups must be nonempty");
  const std::size_t n1 = s1.size();
  const std::size_t n = n1 + s2.size();
  std::vector<DiscreteCurve> pooled = s1;
  pooled.insert(pooled.end(), s2.begin(), s2.end());

  TestResult out;
  out.R = cfg.R;
  out.seed = cfg.seed;
  out.J_observed = two_sample_statistic(s1, s2, spec, b, frame, cfg);

  // Resamples always use the closed-form estimator.
  TestConfig resample_cfg = cfg;
  resample_cfg.fit.method = FitMethod::fre;

  const Rng root(cfg.seed);
  out.J_resampled.reserve(static_cast<std::size_t>(cfg.R));
  for (int r = 0; r < cfg.R; ++r) {
    Rng rng = root.substream(static_cast<std::uint64_t>(r));
    std::vector<DiscreteCurve> g1;
    std::vector<DiscreteCurve> g2;
    if (cfg.bootstrap) {
      for (std::size_t i = 0; i < n; ++i) (i < n1 ? g1 : g2).push_back(pooled[rng.uniform_index(n)]);
    } else {
      const std::vector<int> perm = rng.permutation(static_cast<int>(n));
      for (std::size_t i = 0; i < n; ++i) (i < n1 ? g1 : g2).push_back(pooled[static_cast<std::size_t>(perm[i])]);
    }
    try {
      out.J_resampled.push_back(two_sample_statistic(g1, g2, spec, b, frame, resample_cfg));
    } catch (const Error& e) {
      std::ostringstream msg;
      msg << "resample " << r << " failed: " << e.what();
      throw Error(msg.str());
    }
  }
  out.p_value = permutation_p_value(out.J_observed, out.J_resampled);
  return out;
}

}  // namespace rgp
