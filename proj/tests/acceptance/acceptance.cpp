#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "rgp/commands.hpp"
#include "rgp/errors.hpp"
#include "rgp/estimate.hpp"
#include "rgp/frechet.hpp"
#include "rgp/inference.hpp"
#include "rgp/presets.hpp"

using namespace rgp;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

std::vector<Manifold> geometry_manifolds() {
  return {Manifold::sphere(2), Manifold::sphere(3), Manifold::spd(2), Manifold::spd(3), Manifold::euclidean(3)};
}

// 1. exp/log round trips, transport isometry and distance identity on 1000 random draws per manifold.
Outcome geometry_kernel() {
  Rng rng(101);
  double worst_rt = 0.0;
  double worst_iso = 0.0;
  double worst_dist = 0.0;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::mt19937_64 eng(7);
  for (const Manifold& m : geometry_manifolds()) {
    const double max_len = m.is_spherical() ? std::numbers::pi - 1e-3 : 3.0;
    for (int i = 0; i < 1000; ++i) {
      const Point p = fixtures::random_point(m, rng);
      const double len = max_len * unif(eng);
      const Eigen::VectorXd v = fixtures::random_tangent(m, p, len, rng);
      const Point x = exp_map(m, {p, v});
      worst_rt = std::max(worst_rt, norm(m, p, log_map(m, p, x).vec - v));
      worst_dist = std::max(worst_dist, std::abs(distance(m, p, x) - norm(m, p, v)));
      const Eigen::VectorXd a = fixtures::random_tangent(m, p, 1.0, rng);
      const Eigen::VectorXd b = fixtures::random_tangent(m, p, 1.0, rng);
      const Eigen::VectorXd ta = transport(m, p, x, {p, a}).vec;
      const Eigen::VectorXd tb = transport(m, p, x, {p, b}).vec;
      worst_iso = std::max(worst_iso, std::abs(inner(m, x, ta, tb) - inner(m, p, a, b)));
      worst_iso = std::max(worst_iso, std::abs(norm(m, x, ta) - 1.0));
    }
  }
  return {worst_rt < 1e-8 && worst_iso < 1e-9 && worst_dist < 1e-9,
          "max exp/log round trip " + sci(worst_rt) + ", transport isometry " + sci(worst_iso) +
              ", distance-norm " + sci(worst_dist)};
}

double turning_angle(const Eigen::VectorXd& back, const Eigen::VectorXd& forward) {
  return std::acos(std::clamp(back.dot(forward) / (back.norm() * forward.norm()), -1.0, 1.0));
}

double geodesic_angle(const Manifold& m, const Point& prev, const Point& here, const Point& next) {
  const Eigen::VectorXd a = log_map(m, here, prev).vec;
  const Eigen::VectorXd b = log_map(m, here, next).vec;
  return std::acos(std::clamp(inner(m, here, a, b) / (norm(m, here, a) * norm(m, here, b)), -1.0, 1.0));
}

// 2. roll/unroll and wrap/unwrap round trips with length and angle preservation.
Outcome rolling_round_trips() {
  Rng rng(202);
  double worst_roll = 0.0;
  double worst_wrap = 0.0;
  double worst_len = 0.0;
  double worst_angle = 0.0;
  const std::vector<Manifold> ms{Manifold::sphere(2), Manifold::so3quat(), Manifold::spd(2), Manifold::spd(3),
                                 Manifold::euclidean(3)};
  for (const Manifold& m : ms) {
    for (int c = 0; c < 100; ++c) {
      const int r = 100;
      const Point b = fixtures::random_point(m, rng);
      const Eigen::MatrixXd F = frame_at(m, b);
      const Eigen::MatrixXd coords = fixtures::smooth_coords(m.d, r, 0.6, rng);
      const DiscreteCurve g = Development::roll(m, b, F, coords).curve();

      const FlatCurve f = unroll(g, b, F);
      worst_roll = std::max(worst_roll, fixtures::max_pointwise_distance(roll(f, m), g));
      for (int j = 0; j + 1 < r; ++j) {
        const double flat_len = (f.coords.col(j + 1) - f.coords.col(j)).norm();
        worst_len = std::max(worst_len, std::abs(flat_len - distance(m, g.point(j), g.point(j + 1))));
        if (j > 0) {
          const double flat = turning_angle(f.coords.col(j - 1) - f.coords.col(j), f.coords.col(j + 1) - f.coords.col(j));
          worst_angle = std::max(worst_angle, std::abs(flat - geodesic_angle(m, g.point(j - 1), g.point(j), g.point(j + 1))));
        }
      }

      // A second smooth curve near g, built by rolling perturbed coordinates.
      const Eigen::MatrixXd near = f.coords + fixtures::smooth_coords(m.d, r, 0.25, rng);
      const DiscreteCurve x = Development::roll(m, b, F, near).curve();
      const FlatCurve h = unwrap(x, g, b, F);
      worst_wrap = std::max(worst_wrap, fixtures::max_pointwise_distance(wrap(h, g), x));
    }
  }
  return {worst_roll < 1e-8 && worst_wrap < 1e-8 && worst_len < 1e-7 && worst_angle < 1e-7,
          "roll.unroll " + sci(worst_roll) + ", wrap.unwrap " + sci(worst_wrap) + ", segment length " +
              sci(worst_len) + ", turning angle " + sci(worst_angle)};
}

// 3. Unwrapping simulated curves against the true rolled mean returns the flat draws.
Outcome exact_recovery() {
  std::ostringstream detail;
  bool pass = true;
  for (const std::string& name : {"s2-hetero", "spd-demo", "so3-synthetic"}) {
    const RGPModel model = preset_model(name);
    const DiscreteCurve g = mean_curve(model);
    const Simulation sim = simulate(model, 20, Rng(303), {InjectivityCheck::allow});
    double worst = 0.0;
    int beyond = 0;
    for (std::size_t i = 0; i < sim.curves.size(); ++i) {
      double err = 0.0;
      try {
        err = (unwrap_coords(sim.curves[i], g, model.base, model.frame) - sim.Z[i]).norm();
      } catch (const CutLocusError&) {
        err = std::numeric_limits<double>::infinity();
      }
      worst = std::max(worst, err);
      const Development dev(g, model.base, model.frame);
      const Eigen::MatrixXd dev_norms = (sim.Z[i] - dev.unrolled()).colwise().norm();
      if (model.manifold.is_spherical() && dev_norms.maxCoeff() >= std::numbers::pi) ++beyond;
    }
    const bool ok = worst < 1e-8;
    pass = pass && ok;
    detail << name << " max " << sci(worst);
    if (beyond > 0) detail << " (" << beyond << "/20 draws deviate by more than pi somewhere)";
    detail << "; ";
  }
  return {pass, detail.str()};
}

// 4. (1/n) sum H(X_i; G) Phi^- equals H(G; G) Phi^- at the Frechet mean curve G.
Outcome closed_form_identity() {
  std::ostringstream detail;
  bool pass = true;
  const std::vector<std::pair<std::string, RGPModel>> cases{
      {"s2-hetero x0.05", fixtures::scaled_model(preset_model("s2-hetero"), 0.05)},
      {"spd-demo", preset_model("spd-demo")}};
  for (const auto& [name, model] : cases) {
    const Simulation sim = simulate(model, 30, Rng(404));
    const FreMean fm = fre_mean(sim.curves, model.basis, model.base, model.frame);
    Eigen::MatrixXd avg = Eigen::MatrixXd::Zero(fm.M.rows(), fm.M.cols());
    for (const Eigen::MatrixXd& w : fm.W) avg += w / static_cast<double>(fm.W.size());
    const double err = (avg - fm.M).norm();
    pass = pass && err < 1e-9;
    detail << name << " " << sci(err) << "; ";
  }
  return {pass, detail.str()};
}

Eigen::MatrixXd difference_gram(const Eigen::MatrixXd& H) {
  const Eigen::MatrixXd D = H.colwise() - H.col(0);
  return D.transpose() * D;
}

// 5. Refitting under another base point and frame.
Outcome equivariance() {
  std::ostringstream detail;
  bool pass = true;
  Rng rng(505);
  const std::vector<std::pair<std::string, RGPModel>> cases{
      {"s2-hetero x0.05", fixtures::scaled_model(preset_model("s2-hetero"), 0.05)},
      {"spd-demo", preset_model("spd-demo")}};
  for (const auto& [name, model] : cases) {
    const Manifold& m = model.manifold;
    const Simulation sim = simulate(model, 20, Rng(55));
    const DiscreteCurve g0 = mean_curve(model);
    // Another base point near the data and a rotated frame there.
    const Point b2 = exp_map(m, {g0.point(50), fixtures::random_tangent(m, g0.point(50), 0.4, rng)});
    const Eigen::MatrixXd F2 = frame_at(m, b2) * fixtures::random_orthogonal(m.d, rng);

    double worst_curve = 0.0;
    for (FitMethod method : {FitMethod::fre, FitMethod::ls}) {
      FitConfig cfg;
      cfg.method = method;
      const FitResult a = fit(sim.curves, model.basis, model.base, model.frame, cfg);
      const FitResult b = fit(sim.curves, model.basis, b2, F2, cfg);
      worst_curve = std::max(worst_curve, fixtures::max_pointwise_distance(a.gamma_hat, b.gamma_hat));
    }

    const DiscreteCurve gamma = frechet_mean_curve(sim.curves);
    const Development d1(gamma, model.base, model.frame);
    const Development d2(gamma, b2, F2);
    double worst_gram = 0.0;
    double worst_rewrap = 0.0;
    for (const DiscreteCurve& x : sim.curves) {
      const Eigen::MatrixXd H1 = d1.unwrap(x);
      const Eigen::MatrixXd H2 = d2.unwrap(x);
      worst_gram = std::max(worst_gram, (difference_gram(H1) - difference_gram(H2)).cwiseAbs().maxCoeff());
      // H2 = a 1^T + A H1 with A orthogonal, recovered from the first column pair of frames.
      const Eigen::MatrixXd& E1 = d1.transported_frame(0);
      const Eigen::MatrixXd& E2 = d2.transported_frame(0);
      Eigen::MatrixXd A(m.d, m.d);
      for (int r = 0; r < m.d; ++r) {
        for (int c = 0; c < m.d; ++c) A(r, c) = inner(m, gamma.point(0), E2.col(r), E1.col(c));
      }
      const Eigen::VectorXd a = H2.col(0) - A * H1.col(0);
      const Eigen::MatrixXd mapped = (A * H1).colwise() + a;
      worst_rewrap = std::max(worst_rewrap, fixtures::max_pointwise_distance(d2.wrap(mapped), x));
    }
    const bool ok = worst_curve < 1e-6 && worst_gram < 1e-8 && worst_rewrap < 1e-8;
    pass = pass && ok;
    detail << name << ": mean curves " << sci(worst_curve) << ", Gram " << sci(worst_gram) << ", rewrap "
           << sci(worst_rewrap) << "; ";
  }
  return {pass, detail.str()};
}

// 6. Flip-flop monotonicity, Kronecker oracle and Monte Carlo consistency.
Outcome flipflop_checks() {
  // Monotonicity on fitted residuals from every preset.
  double worst_drop = 0.0;
  for (const std::string& name : {"spd-demo", "so3-synthetic"}) {
    const RGPModel model = preset_model(name);
    for (int n : {15, 40, 120}) {
      const Simulation sim = simulate(model, n, Rng(600 + static_cast<std::uint64_t>(n)));
      const FreMean fm = fre_mean(sim.curves, model.basis, model.base, model.frame);
      std::vector<Eigen::MatrixXd> R;
      for (const Eigen::MatrixXd& w : fm.W) R.push_back(w - fm.M);
      const FlipFlopResult ff = flipflop(R, {});
      for (std::size_t i = 1; i < ff.loglik.size(); ++i) worst_drop = std::max(worst_drop, ff.loglik[i - 1] - ff.loglik[i]);
    }
  }

  // Kronecker oracle on d = 2, k = 3, n = 5.
  Rng rng(606);
  const MNParams p{rng.standard_normal(2, 3), Eigen::Matrix2d{{1.3, -0.4}, {-0.4, 0.9}},
                   Eigen::Matrix3d{{0.8, 0.2, 0.1}, {0.2, 1.1, 0.3}, {0.1, 0.3, 0.7}}};
  std::vector<Eigen::MatrixXd> W;
  for (int i = 0; i < 5; ++i) W.push_back(sample_mn(p, rng));
  Eigen::MatrixXd S(6, 6);
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) S.block(2 * a, 2 * b, 2, 2) = p.V(a, b) * p.U;
  }
  const Eigen::MatrixXd Sinv = S.inverse();
  double dense = 0.0;
  for (const Eigen::MatrixXd& w : W) {
    const Eigen::MatrixXd r = w - p.M;
    const Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(r.data(), 6);
    dense += -0.5 * std::log(S.determinant()) - 0.5 * x.dot(Sinv * x);
  }
  const double oracle_err = std::abs(mn_loglik(p, W) - dense);

  // Consistency with n = 2000.
  const Eigen::Matrix3d V{{1.0, 0.5, 0.2}, {0.5, 1.5, 0.3}, {0.2, 0.3, 0.8}};
  const MNParams truth{Eigen::MatrixXd::Zero(2, 3), Eigen::Matrix2d::Identity(), V};
  std::vector<Eigen::MatrixXd> R;
  Rng mc(607);
  for (int i = 0; i < 2000; ++i) R.push_back(sample_mn(truth, mc));
  const FlipFlopResult ff = flipflop(R, {});
  const double err_v = (ff.V - V).norm();
  const double err_u = (ff.U - Eigen::Matrix2d::Identity()).norm();

  return {worst_drop <= 1e-8 && oracle_err < 1e-9 && err_v < 0.1 && err_u < 0.1,
          "largest loglik drop " + sci(std::max(0.0, worst_drop)) + ", Kronecker oracle " + sci(oracle_err) +
              ", n=2000 errors U " + sci(err_u) + " V " + sci(err_v)};
}

// 7. Convergence table on the SPD demo.
Outcome convergence_table() {
  const std::vector<int> ns{10, 25, 50, 100, 500};
  const ConvergenceTable t = run_convergence(preset_model("spd-demo"), ns, 10, 700, FitConfig{});
  const double ref[3][5] = {{2.19, 0.46, 0.30, 0.14, 0.10}, {0.47, 0.27, 0.19, 0.15, 0.06}, {1.16, 0.72, 0.55, 0.32, 0.15}};
  bool within = true;
  std::ostringstream detail;
  const char* names[3] = {"M", "U", "V"};
  for (int metric = 0; metric < 3; ++metric) {
    detail << names[metric] << " medians";
    for (std::size_t c = 0; c < ns.size(); ++c) {
      const ConvergenceRow& row = t.medians[c];
      const double v = metric == 0 ? row.metric_M : metric == 1 ? row.metric_U : row.metric_V;
      const double ratio = v / ref[metric][c];
      const bool ok = ratio <= 3.0 && ratio >= 1.0 / 3.0;
      within = within && ok;
      detail << " " << sci(v) << (ok ? "" : "*");
    }
    detail << "; ";
  }
  const bool decreasing = t.median_M_decreasing && t.median_U_decreasing && t.median_V_decreasing;
  detail << "strictly decreasing: " << (decreasing ? "yes" : "no") << " (* = outside the factor-3 band)";
  return {decreasing && within, detail.str()};
}

// 8. Sup-distance between the pointwise Frechet mean and the rolled mean on SPD.
Outcome frechet_rate() {
  const RGPModel model = preset_model("spd-demo");
  const DiscreteCurve g = mean_curve(model);
  auto sup_error = [&](int n) {
    std::vector<double> errs;
    for (int s = 0; s < 20; ++s) {
      const Simulation sim = simulate(model, n, Rng(800 + static_cast<std::uint64_t>(s)));
      errs.push_back(fixtures::max_pointwise_distance(frechet_mean_curve(sim.curves), g));
    }
    return median(errs);
  };
  const double e25 = sup_error(25);
  const double e400 = sup_error(400);
  const double ratio = e400 / e25;
  // n^{-1/2} predicts 0.25; a factor of 2 either way, capped at one half.
  const bool ok = ratio <= 0.5 && ratio >= 0.125;
  return {ok, "median sup distance n=25 " + sci(e25) + ", n=400 " + sci(e400) + ", ratio " + sci(ratio) +
                  " (n^-1/2 predicts 0.25)"};
}

// 9. Calibration under the null and power under a mean shift on the quaternion hemisphere.
Outcome two_sample() {
  const RGPModel base = preset_model("so3-synthetic");
  const RGPModel shifted = preset_model("so3-synthetic-shifted");
  TestConfig cfg;
  cfg.R = 99;
  int rejections = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const Rng rng(900 + static_cast<std::uint64_t>(trial));
    const Simulation a = simulate(base, 20, rng.substream(0));
    const Simulation b = simulate(base, 20, rng.substream(1));
    cfg.seed = 5000 + static_cast<std::uint64_t>(trial);
    const TestResult res = permutation_test(a.curves, b.curves, base.basis, base.base, base.frame, cfg);
    if (res.p_value <= 0.05) ++rejections;
  }
  cfg.R = 200;
  int minimal = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const Rng rng(950 + static_cast<std::uint64_t>(trial));
    const Simulation a = simulate(base, 30, rng.substream(0));
    const Simulation b = simulate(shifted, 30, rng.substream(1));
    cfg.seed = 7000 + static_cast<std::uint64_t>(trial);
    const TestResult res = permutation_test(a.curves, b.curves, base.basis, base.base, base.frame, cfg);
    if (res.p_value == 1.0 / 201.0) ++minimal;
  }
  return {rejections <= 10 && minimal >= 19, "null rejections at 0.05: " + std::to_string(rejections) +
                                                  "/100; shifted mean p = 1/201 in " + std::to_string(minimal) + "/20"};
}

// 10. Euclidean pipeline against closed-form vector-space computations.
Outcome flat_oracle() {
  Rng rng(1001);
  const Manifold m = Manifold::euclidean(3);
  double worst = 0.0;
  auto track = [&](double e) { worst = std::max(worst, e); };

  const Point p = rng.standard_normal(3, 1);
  const Point x = rng.standard_normal(3, 1);
  const Eigen::VectorXd v = rng.standard_normal(3, 1);
  track((exp_map(m, {p, v}) - (p + v)).norm());
  track((log_map(m, p, x).vec - (x - p)).norm());
  track((transport(m, p, x, {p, v}).vec - v).norm());
  track(std::abs(distance(m, p, x) - (x - p).norm()));

  RGPModel model;
  model.manifold = m;
  model.basis.k = 8;
  model.grid = TimeGrid::uniform(60);
  model.params = {rng.standard_normal(3, 8), Eigen::Matrix3d{{1.0, 0.2, 0.0}, {0.2, 0.7, 0.1}, {0.0, 0.1, 0.5}},
                  0.3 * banded_covariance(Eigen::VectorXd::Constant(8, 1.0), 0.7)};
  model.base = rng.standard_normal(3, 1);
  model.frame = fixtures::random_orthogonal(3, rng);
  const Eigen::MatrixXd phi = bspline_matrix(model.basis, model.grid);
  const Eigen::MatrixXd pm = right_inverse(phi);
  const Eigen::MatrixXd& F = model.frame;
  const Point& b = model.base;

  const DiscreteCurve g = mean_curve(model);
  track((g.points - ((F * model.params.M * phi).colwise() + b)).norm());
  const Simulation sim = simulate(model, 25, Rng(1002));
  Eigen::MatrixXd mean_points = Eigen::MatrixXd::Zero(3, 60);
  std::vector<Eigen::MatrixXd> W;
  for (std::size_t i = 0; i < sim.curves.size(); ++i) {
    const DiscreteCurve& c = sim.curves[i];
    track((c.points - ((F * sim.Z[i]).colwise() + b)).norm());
    const Eigen::MatrixXd H = F.transpose() * (c.points.colwise() - b);
    track((unroll(c, b, F).coords - H).norm());
    track((unwrap(c, g, b, F).coords - H).norm());
    track((roll({b, F, H}, m).points - c.points).norm());
    track((wrap({b, F, H}, g).points - c.points).norm());
    mean_points += c.points / 25.0;
    W.push_back(H * pm);
  }
  track((frechet_mean_curve(sim.curves).points - mean_points).norm());

  const Eigen::MatrixXd M_flat = F.transpose() * (mean_points.colwise() - b) * pm;
  std::vector<Eigen::MatrixXd> R;
  for (const Eigen::MatrixXd& w : W) R.push_back(w - M_flat);
  const FlipFlopResult ff = flipflop(R, {});
  for (FitMethod method : {FitMethod::fre, FitMethod::ls, FitMethod::mle}) {
    FitConfig cfg;
    cfg.method = method;
    const FitResult f = fit(sim.curves, model.basis, b, F, cfg);
    track((f.params.M - M_flat).norm());
    track((f.params.U - ff.U).norm());
    track((f.params.V - ff.V).norm());
  }
  const FitResult f1 = fit_fre(std::vector<DiscreteCurve>(sim.curves.begin(), sim.curves.begin() + 12), model.basis, b, F);
  const FitResult f2 = fit_fre(std::vector<DiscreteCurve>(sim.curves.begin() + 12, sim.curves.end()), model.basis, b, F);
  const Eigen::MatrixXd D = f1.params.M - f2.params.M;
  const Eigen::MatrixXd Up = (11.0 * f1.params.U + 12.0 * f2.params.U) / 23.0;
  const Eigen::MatrixXd Vp = (11.0 * f1.params.V + 12.0 * f2.params.V) / 23.0;
  const double J = (Vp.inverse() * D.transpose() * Up.inverse() * D).trace();
  track(std::abs(hotelling_stat(f1, f2, 12, 13) - J) / std::max(1.0, J));
  return {worst <= 1e-10, "largest deviation from the vector-space computation " + sci(worst)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"geometry kernel", geometry_kernel},
      {"rolling round trips", rolling_round_trips},
      {"exact recovery of flat draws", exact_recovery},
      {"closed-form mean identity", closed_form_identity},
      {"equivariance under base point and frame", equivariance},
      {"flip-flop", flipflop_checks},
      {"convergence table", convergence_table},
      {"Frechet mean rate on SPD", frechet_rate},
      {"two-sample test", two_sample},
      {"flat oracle", flat_oracle},
  };
  const double limits[] = {5.0, 30.0, 30.0, 0.0, 0.0, 0.0, 600.0, 0.0, 0.0, 0.0};
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (limits[i] > 0.0 && secs > limits[i]) {
      o.pass = false;
      o.detail += "; over the " + sci(limits[i]) + " s budget";
    }
    if (!o.pass) ++failures;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << (i + 1) << " (" << criteria[i].first << "): " << o.detail
              << " [" << sci(secs) << " s]" << std::endl;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failures)) << "/" << criteria.size() << " criteria passed"
            << std::endl;
  return failures == 0 ? 0 : 1;
}
