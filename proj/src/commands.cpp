#include "rgp/commands.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "rgp/bundle.hpp"
#include "rgp/errors.hpp"
#include "rgp/inference.hpp"
#include "rgp/presets.hpp"

namespace rgp {

using nlohmann::json;

namespace {

struct SimulateArgs {
  std::string preset;
  std::string model;
  int n = 0;
  std::uint64_t seed = 0;
  std::string out;
};

struct FitArgs {
  std::string in;
  std::string method = "fre";
  int k = 10;
  std::uint64_t seed = 0;
  std::string out;
};

struct ConvergenceArgs {
  std::string preset = "spd-demo";
  std::vector<int> n_list{10, 25, 50, 100, 500};
  int seeds = 10;
  std::uint64_t seed = 0;
  std::string method = "fre";
  std::string out;
};

struct Test2Args {
  std::string in;
  std::string in2;
  int R = 200;
  std::uint64_t seed = 0;
  std::string out;
  std::string hist;
  bool bootstrap = false;
  int k = 10;
  std::string method = "fre";
  std::string reference = "per-group";
};

std::string fmt(double x) {
  std::ostringstream ss;
  ss << std::setprecision(17) << x;
  return ss.str();
}

Point bundle_base(const CurveBundle& b) { return b.base ? *b.base : default_base(b.manifold); }

Eigen::MatrixXd bundle_frame(const CurveBundle& b, const Point& base) {
  return b.frame ? *b.frame : frame_at(b.manifold, base);
}

void cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  if (a.preset.empty() == a.model.empty()) throw std::invalid_argument("give exactly one of --preset and --model");
  if (a.n < 0) throw std::invalid_argument("--n must be non-negative");
  const RGPModel model = a.preset.empty() ? model_from_json(json::parse(read_text_file(a.model))) : preset_model(a.preset);
  // Draws beyond the injectivity radius are still wrapped; they simply cannot be unwrapped back exactly.
  const Simulation sim = simulate(model, a.n, Rng(a.seed), {InjectivityCheck::allow});
  CurveBundle bundle = make_bundle(model.manifold, sim.curves, model.grid.r);
  bundle.base = model.base;
  bundle.frame = model.frame;
  save_bundle(bundle, a.out);
  out << "wrote " << a.n << " curves to " << a.out << "\n";
}

void cmd_fit(const FitArgs& a, std::ostream& out) {
  FitConfig cfg;
  cfg.method = fit_method_from_string(a.method);
  const CurveBundle bundle = load_bundle(a.in);
  const Point base = bundle_base(bundle);
  const Eigen::MatrixXd frame = bundle_frame(bundle, base);
  BasisSpec spec;
  spec.k = a.k;
  const FitResult res = fit(bundle.curves, spec, base, frame, cfg);

  json report;
  report["method"] = std::string(to_string(res.method));
  report["k"] = a.k;
  report["M_w"] = matrix_to_json(res.params.M);
  report["U_w"] = matrix_to_json(res.params.U);
  report["V_w"] = matrix_to_json(res.params.V);
  report["gamma_hat"] = matrix_to_json(res.gamma_hat.points.transpose());
  report["loglik"] = res.loglik;
  report["iterations"] = res.iterations;
  report["base"] = vector_to_json(base);
  report["frame"] = matrix_to_json(frame);
  write_text_file(a.out, report.dump(1) + "\n");
  out << "fitted " << bundle.curves.size() << " curves (" << a.method << "), loglik " << fmt(res.loglik) << "\n";
}

void cmd_convergence(const ConvergenceArgs& a, std::ostream& out) {
  if (a.seeds < 1) throw std::invalid_argument("--seeds must be positive");
  if (a.n_list.empty()) throw std::invalid_argument("--n-list must not be empty");
  for (std::size_t i = 0; i < a.n_list.size(); ++i) {
    if (a.n_list[i] < 1 || (i > 0 && a.n_list[i] <= a.n_list[i - 1])) {
      throw std::invalid_argument("--n-list must be strictly ascending positive sizes");
    }
  }
  FitConfig cfg;
  cfg.method = fit_method_from_string(a.method);
  const ConvergenceTable table = run_convergence(preset_model(a.preset), a.n_list, a.seeds, a.seed, cfg);
  write_text_file(a.out, convergence_csv(table));
  out << "median metric_M strictly decreasing: " << (table.median_M_decreasing ? "yes" : "no") << "\n"
      << "median metric_U strictly decreasing: " << (table.median_U_decreasing ? "yes" : "no") << "\n"
      << "median metric_V strictly decreasing: " << (table.median_V_decreasing ? "yes" : "no") << "\n";
}

std::string histogram_csv(const std::vector<double>& values, double observed, int bins) {
  double lo = observed;
  double hi = observed;
  for (double v : values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (hi <= lo) hi = lo + 1.0;
  const double width = (hi - lo) / bins;
  std::vector<int> counts(static_cast<std::size_t>(bins), 0);
  for (double v : values) {
    const int b = std::min(bins - 1, static_cast<int>((v - lo) / width));
    ++counts[static_cast<std::size_t>(b)];
  }
  std::ostringstream ss;
  ss << "bin_lo,bin_hi,count,contains_observed\n";
  for (int b = 0; b < bins; ++b) {
    const double a0 = lo + b * width;
    const double a1 = lo + (b + 1) * width;
    const bool has_obs = observed >= a0 && (observed < a1 || b == bins - 1);
    ss << fmt(a0) << "," << fmt(a1) << "," << counts[static_cast<std::size_t>(b)] << "," << (has_obs ? 1 : 0) << "\n";
  }
  return ss.str();
}

void cmd_test2(const Test2Args& a, std::ostream& out) {
  TestConfig cfg;
  cfg.R = a.R;
  cfg.seed = a.seed;
  cfg.bootstrap = a.bootstrap;
  cfg.fit.method = fit_method_from_string(a.method);
  cfg.reference = a.reference == "pooled" ? ReferenceCurve::pooled : ReferenceCurve::per_group;

  const CurveBundle first = load_bundle(a.in);
  std::vector<DiscreteCurve> s1;
  std::vector<DiscreteCurve> s2;
  std::vector<std::string> names;
  if (!a.in2.empty()) {
    const CurveBundle second = load_bundle(a.in2);
    if (!(second.manifold == first.manifold) || second.times.size() != first.times.size()) {
      throw std::invalid_argument("the two bundles must share manifold and time grid");
    }
    s1 = first.curves;
    s2 = second.curves;
    names = {a.in, a.in2};
  } else {
    if (first.labels.empty()) throw std::invalid_argument("bundle has no labels; give --in2 or a labelled bundle");
    for (const std::string& l : first.labels) {
      if (std::find(names.begin(), names.end(), l) == names.end()) names.push_back(l);
    }
    if (names.size() != 2) throw std::invalid_argument("labels must name exactly two groups");
    for (std::size_t i = 0; i < first.curves.size(); ++i) {
      (first.labels[i] == names[0] ? s1 : s2).push_back(first.curves[i]);
    }
  }

  const Point base = bundle_base(first);
  const Eigen::MatrixXd frame = bundle_frame(first, base);
  BasisSpec spec;
  spec.k = a.k;
  const TestResult res = permutation_test(s1, s2, spec, base, frame, cfg);

  json report;
  report["J_observed"] = res.J_observed;
  report["p_value"] = res.p_value;
  report["R"] = res.R;
  report["seed"] = res.seed;
  report["bootstrap"] = a.bootstrap;
  report["groups"] = names;
  report["n1"] = s1.size();
  report["n2"] = s2.size();
  report["J_resampled"] = res.J_resampled;
  write_text_file(a.out, report.dump(1) + "\n");
  if (!a.hist.empty()) write_text_file(a.hist, histogram_csv(res.J_resampled, res.J_observed, 20));
  out << "J = " << fmt(res.J_observed) << ", p = " << fmt(res.p_value) << " (R = " << res.R << ")\n";
}

bool strictly_decreasing(const std::vector<ConvergenceRow>& med, double ConvergenceRow::*field) {
  for (std::size_t i = 1; i < med.size(); ++i) {
    if (!(med[i].*field < med[i - 1].*field)) return false;
  }
  return true;
}

}  // namespace

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of an empty list");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

ConvergenceTable run_convergence(const RGPModel& model, const std::vector<int>& n_list, int seeds,
                                 std::uint64_t base_seed, const FitConfig& cfg) {
  const Eigen::LLT<Eigen::MatrixXd> lu(model.params.U);
  const Eigen::LLT<Eigen::MatrixXd> lv(model.params.V);
  ConvergenceTable table;
  for (int n : n_list) {
    std::vector<double> mM, mU, mV;
    for (int s = 0; s < seeds; ++s) {
      const Simulation sim = simulate(model, n, Rng(base_seed + static_cast<std::uint64_t>(s)));
      const FitResult f = fit(sim.curves, model.basis, model.base, model.frame, cfg);
      const Eigen::MatrixXd D = f.params.M - model.params.M;
      ConvergenceRow row;
      row.n = n;
      row.seed = s;
      row.metric_M = (lu.solve(D) * lv.solve(D.transpose())).trace();
      row.metric_U = spd_distance(model.params.U, f.params.U);
      row.metric_V = spd_distance(model.params.V, f.params.V);
      mM.push_back(row.metric_M);
      mU.push_back(row.metric_U);
      mV.push_back(row.metric_V);
      table.rows.push_back(row);
    }
    table.medians.push_back({n, -1, median(mM), median(mU), median(mV)});
  }
  table.median_M_decreasing = strictly_decreasing(table.medians, &ConvergenceRow::metric_M);
  table.median_U_decreasing = strictly_decreasing(table.medians, &ConvergenceRow::metric_U);
  table.median_V_decreasing = strictly_decreasing(table.medians, &ConvergenceRow::metric_V);
  return table;
}

std::string convergence_csv(const ConvergenceTable& table) {
  std::ostringstream ss;
  ss << "n,seed,metric_M,metric_U,metric_V\n";
  for (const ConvergenceRow& r : table.rows) {
    ss << r.n << "," << r.seed << "," << fmt(r.metric_M) << "," << fmt(r.metric_U) << "," << fmt(r.metric_V) << "\n";
  }
  for (const ConvergenceRow& r : table.medians) {
    ss << r.n << ",median," << fmt(r.metric_M) << "," << fmt(r.metric_U) << "," << fmt(r.metric_V) << "\n";
  }
  return ss.str();
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rolled Gaussian processes on manifolds", "rgp"};
  app.require_subcommand(1);
  const auto methods = CLI::IsMember({"fre", "ls", "mle"});

  SimulateArgs sa;
  auto* sim = app.add_subcommand("simulate", "Simulate curves from a preset or a model file");
  sim->add_option("--preset", sa.preset, "Preset name")->check(CLI::IsMember(preset_names()));
  sim->add_option("--model", sa.model, "Model JSON file");
  sim->add_option("--n", sa.n, "Number of curves")->required();
  sim->add_option("--seed", sa.seed, "Random seed");
  sim->add_option("--out", sa.out, "Output bundle")->required();

  FitArgs fa;
  auto* fit_cmd = app.add_subcommand("fit", "Fit the model to a curve bundle");
  fit_cmd->add_option("--in", fa.in, "Input bundle")->required();
  fit_cmd->add_option("--method", fa.method, "fre, ls or mle")->check(methods);
  fit_cmd->add_option("--k", fa.k, "Number of basis functions");
  fit_cmd->add_option("--seed", fa.seed, "Seed (fits are deterministic; recorded for reproducibility)");
  fit_cmd->add_option("--out", fa.out, "Output report")->required();

  ConvergenceArgs ca;
  auto* conv = app.add_subcommand("convergence", "Estimator error against sample size");
  conv->add_option("--preset", ca.preset, "Preset name")->check(CLI::IsMember(preset_names()));
  conv->add_option("--n-list", ca.n_list, "Comma-separated sample sizes")->delimiter(',');
  conv->add_option("--seeds", ca.seeds, "Replicates per sample size");
  conv->add_option("--seed", ca.seed, "Base seed");
  conv->add_option("--method", ca.method, "fre, ls or mle")->check(methods);
  conv->add_option("--out", ca.out, "Output CSV")->required();

  Test2Args ta;
  auto* test2 = app.add_subcommand("test2", "Two-sample permutation test for equal mean curves");
  test2->add_option("--in", ta.in, "Labelled bundle, or the first group")->required();
  test2->add_option("--in2", ta.in2, "Second group");
  test2->add_option("--R", ta.R, "Number of resamples")->check(CLI::PositiveNumber);
  test2->add_option("--seed", ta.seed, "Random seed");
  test2->add_option("--out", ta.out, "Output JSON")->required();
  test2->add_option("--hist", ta.hist, "Null histogram CSV");
  test2->add_flag("--bootstrap", ta.bootstrap, "Resample with replacement");
  test2->add_option("--k", ta.k, "Number of basis functions");
  test2->add_option("--method", ta.method, "Estimator for the observed statistic")->check(methods);
  test2->add_option("--reference", ta.reference, "per-group or pooled")->check(CLI::IsMember({"per-group", "pooled"}));

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*sim) cmd_simulate(sa, out);
    if (*fit_cmd) cmd_fit(fa, out);
    if (*conv) cmd_convergence(ca, out);
    if (*test2) cmd_test2(ta, out);
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace rgp
