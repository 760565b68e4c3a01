// peakfit: locate the maximizer and maximum of a noisy regression function
// under a fixed sampling budget, by staged zoom-in polynomial fitting.

#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "peakfit/csv.hpp"
#include "peakfit/errors.hpp"
#include "peakfit/harness.hpp"

namespace {

using nlohmann::json;
using namespace peakfit;

constexpr const char* kVersion = "0.1.0";

// Accepts the flat key=value format natively and a JSON object as the
// alternative; nested objects address subcommand sections.
class JsonOrIniConfig : public CLI::ConfigBase {
 public:
  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    const std::streampos start = input.tellg();
    char c = 0;
    while (input.get(c) && std::isspace(static_cast<unsigned char>(c))) {
    }
    input.clear();
    input.seekg(start);
    if (c != '{') return CLI::ConfigBase::from_config(input);
    std::vector<CLI::ConfigItem> items;
    append(json::parse(input), {}, items);
    return items;
  }

 private:
  static std::string scalar(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    return v.dump();
  }
  static void append(const json& j, std::vector<std::string> parents,
                     std::vector<CLI::ConfigItem>& items) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (it.value().is_object()) {
        auto p = parents;
        p.push_back(it.key());
        append(it.value(), std::move(p), items);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = it.key();
      if (it.value().is_array()) {
        for (const auto& v : it.value()) item.inputs.push_back(scalar(v));
      } else {
        item.inputs.push_back(scalar(it.value()));
      }
      items.push_back(std::move(item));
    }
  }
};

struct CommonOpts {
  std::string fn = "sec5";
  int dim = 0;
  double sigma = 0.1;
  std::uint64_t seed = 1;
  std::string out;
  int threads = 1;
};

std::string default_out_dir() {
  if (const char* env = std::getenv("PEAKFIT_OUT")) return env;
  return ".";
}

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--fn", opts.fn, "test function: sec5 | quad | bump")
      ->capture_default_str();
  cmd->add_option("--dim", opts.dim, "dimension for quad/bump (default 2)");
  cmd->add_option("--sigma", opts.sigma, "noise standard deviation")->capture_default_str();
  cmd->add_option("--seed", opts.seed, "base RNG seed")->capture_default_str();
  cmd->add_option("--out", opts.out, "output directory (default $PEAKFIT_OUT or .)");
  cmd->add_option("--threads", opts.threads, "worker threads for replication batches")
      ->capture_default_str();
}

std::filesystem::path ensure_out_dir(const CommonOpts& opts) {
  std::filesystem::path dir = opts.out.empty() ? default_out_dir() : opts.out;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory: " + dir.string());
  return dir;
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  auto os = csv::open_out(path.string());
  os << content;
  if (!os) throw IoError("write failed: " + path.string());
}

// Full resolved configuration, sufficient to reproduce the run exactly.
void write_manifest(const std::filesystem::path& dir, const std::string& command,
                    const json& config) {
  json manifest;
  manifest["tool"] = "peakfit";
  manifest["version"] = kVersion;
  manifest["command"] = command;
  manifest["config"] = config;
  write_text(dir / "manifest.json", manifest.dump(2) + "\n");
}

std::vector<double> parse_point(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  return out;
}

// "start:stop:count" geometric, or a comma-separated list.
std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    std::stringstream ss(text);
    std::string a, b, c;
    std::getline(ss, a, ':');
    std::getline(ss, b, ':');
    std::getline(ss, c, ':');
    const double start = std::stod(a), stop = std::stod(b);
    const int count = std::stoi(c);
    if (count < 2 || !(start > 0.0) || !(stop > start)) {
      throw ConfigError("bad grid range: " + text);
    }
    for (int i = 0; i < count; ++i) {
      const double t = static_cast<double>(i) / (count - 1);
      out.push_back(start * std::pow(stop / start, t));
    }
  } else {
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  }
  return out;
}

std::vector<std::int64_t> parse_n_grid(const std::string& text) {
  std::vector<std::int64_t> out;
  for (double v : parse_grid(text)) {
    out.push_back(static_cast<std::int64_t>(std::llround(v)));
  }
  return out;
}

json estimator_config_json(const EstimatorConfig& cfg) {
  json j;
  j["alpha"] = cfg.alpha;
  j["upsilon"] = cfg.upsilon;
  j["delta_rule"] = cfg.delta_rule.kind == DeltaRule::Kind::kExplicit ? "explicit" : "rate";
  j["delta_value"] = cfg.delta_rule.value;
  j["bandwidth"] = cfg.smoother.bandwidth;
  j["eval_grid_per_dim"] = cfg.smoother.eval_grid_per_dim;
  j["kernel"] = cfg.smoother.kernel == Kernel::kTricube ? "tricube" : "gaussian";
  j["stages"] = cfg.stages;
  j["m_n_scale"] = cfg.m_n_scale;
  return j;
}

int run_estimate(const CommonOpts& opts, const std::string& command, std::int64_t n,
                 const EstimatorConfig& cfg) {
  const auto dir = ensure_out_dir(opts);
  TestFunction truth = builtin_function(opts.fn, opts.dim);

  json config = estimator_config_json(cfg);
  config["fn"] = opts.fn;
  config["n"] = n;
  config["sigma"] = opts.sigma;
  config["seed"] = opts.seed;
  write_manifest(dir, command, config);

  SamplingOracle oracle(truth, opts.sigma, opts.seed, n);
  const EstimateResult result = command == "multi-stage"
                                    ? multi_stage_estimate(oracle, truth.domain, n, cfg)
                                    : two_stage_estimate(oracle, truth.domain, n, cfg);

  write_text(dir / "result.json", to_json(result).dump(2) + "\n");
  {
    auto os = csv::open_out((dir / "fit.csv").string());
    write_fit_csv(*result.fit, os);
  }
  if (result.stage1) {
    auto os = csv::open_out((dir / "stage1_surface.csv").string());
    write_surface_csv(*result.stage1, os);
  }

  std::cout << "mu_hat =";
  for (double c : result.mu_hat) std::cout << " " << csv::fmt(c);
  std::cout << "\nM_hat = " << csv::fmt(result.M_hat) << "\n";
  if (!truth.true_mu.empty()) {
    double sq = 0.0;
    for (std::size_t k = 0; k < truth.true_mu.size(); ++k) {
      const double t = result.mu_hat[k] - truth.true_mu[k];
      sq += t * t;
    }
    std::cout << "mu error = " << csv::fmt(std::sqrt(sq))
              << "\nM error = " << csv::fmt(std::abs(result.M_hat - truth.true_M)) << "\n";
  }
  std::cout << "samples used = " << result.diagnostics.total_used << " of " << n
            << ", interior certificate = "
            << (result.diagnostics.interior_certified ? "yes" : "no") << "\n";
  return 0;
}

json summary_json(const McSummary& s) {
  json j;
  j["replications"] = s.records.size();
  j["failures"] = s.failures;
  j["budget"] = s.budget;
  j["sq_mu"] = {{"mean", s.sq_mu.mean},
                {"median", s.sq_mu.median},
                {"q25", s.sq_mu.q25},
                {"q75", s.sq_mu.q75}};
  j["sq_M"] = {{"mean", s.sq_M.mean},
               {"median", s.sq_M.median},
               {"q25", s.sq_M.q25},
               {"q75", s.sq_M.q75}};
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"peakfit: staged zoom-in estimation of the maximum of a noisy "
               "regression function"};
  app.set_version_flag("--version", kVersion);
  app.set_config("--config", "", "config file (key=value, or a JSON object)");
  app.config_formatter(std::make_shared<JsonOrIniConfig>());
  app.require_subcommand(1);

  // two-stage / multi-stage --------------------------------------------------
  CommonOpts est_opts;
  std::int64_t est_n = 1255;
  double est_alpha = 3.0, est_upsilon = 0.5, est_delta = 0.1, est_delta_c = 1.0;
  double est_bandwidth = 0.085;
  int est_eval_grid = 25, est_stages = 3;
  std::string est_kernel = "tricube";

  auto add_estimator_flags = [&](CLI::App* cmd) {
    add_common(cmd, est_opts);
    cmd->add_option("--n", est_n, "total sampling budget")->capture_default_str();
    cmd->add_option("--alpha", est_alpha, "assumed smoothness (> 2)")->capture_default_str();
    cmd->add_option("--upsilon", est_upsilon, "stage-1 budget fraction")->capture_default_str();
    cmd->add_option("--delta", est_delta, "explicit localization parameter");
    cmd->add_option("--delta-c", est_delta_c, "rate constant: delta = c n^{-1/(2 alpha)}")
        ->capture_default_str();
    cmd->add_option("--bandwidth", est_bandwidth, "stage-1 smoother bandwidth")
        ->capture_default_str();
    cmd->add_option("--eval-grid", est_eval_grid, "smoother evaluation grid per dim")
        ->capture_default_str();
    cmd->add_option("--kernel", est_kernel, "tricube | gaussian")->capture_default_str();
  };

  CLI::App* two_stage = app.add_subcommand("two-stage", "run the two-stage estimator once");
  add_estimator_flags(two_stage);

  CLI::App* multi_stage =
      app.add_subcommand("multi-stage", "run the multi-stage estimator once");
  add_estimator_flags(multi_stage);
  multi_stage->add_option("--stages", est_stages, "total stages (>= 2)")
      ->capture_default_str();

  // fit -----------------------------------------------------------------------
  CommonOpts fit_opts;
  std::string fit_center;
  double fit_delta = 0.1, fit_alpha = 3.0;
  std::int64_t fit_n = 630;
  CLI::App* fit_cmd = app.add_subcommand(
      "fit", "fit the local polynomial on a symmetric design at a given center");
  add_common(fit_cmd, fit_opts);
  fit_cmd->add_option("--center", fit_center, "design center, comma separated")->required();
  fit_cmd->add_option("--delta", fit_delta, "grid spacing")->capture_default_str();
  fit_cmd->add_option("--alpha", fit_alpha, "assumed smoothness (> 2)")->capture_default_str();
  fit_cmd->add_option("--n", fit_n, "stage-2 budget")->capture_default_str();

  // baseline ------------------------------------------------------------------
  CommonOpts base_opts;
  std::int64_t base_n = 1296;
  double base_bandwidth = 0.085;
  int base_eval_grid = 36;
  CLI::App* baseline_cmd =
      app.add_subcommand("baseline", "run the single-stage baseline estimator once");
  add_common(baseline_cmd, base_opts);
  baseline_cmd->add_option("--n", base_n, "total budget")->capture_default_str();
  baseline_cmd->add_option("--bandwidth", base_bandwidth, "smoother bandwidth")
      ->capture_default_str();
  baseline_cmd->add_option("--eval-grid", base_eval_grid, "evaluation grid per dim")
      ->capture_default_str();

  // replicate-sec5 --------------------------------------------------------------
  CommonOpts sec5_opts;
  int sec5_reps = 500;
  CLI::App* sec5_cmd = app.add_subcommand(
      "replicate-sec5", "two-stage vs single-stage comparison on the sec5 surface");
  add_common(sec5_cmd, sec5_opts);
  sec5_cmd->add_option("--reps", sec5_reps, "replications per method")->capture_default_str();

  // rate-scan -------------------------------------------------------------------
  CommonOpts scan_opts;
  scan_opts.fn = "quad";
  scan_opts.dim = 1;
  std::string scan_n_grid = "2e3,5e3,1.2e4,3e4,7e4";
  int scan_reps = 200;
  double scan_alpha = 4.0, scan_delta_c = 1.0, scan_bw_coef = 1.0, scan_bw_exp = -0.2;
  CLI::App* scan_cmd =
      app.add_subcommand("rate-scan", "empirical convergence-rate scan over budgets");
  add_common(scan_cmd, scan_opts);
  scan_cmd->add_option("--n-grid", scan_n_grid, "budgets: list or start:stop:count")
      ->capture_default_str();
  scan_cmd->add_option("--reps", scan_reps, "replications per budget")->capture_default_str();
  scan_cmd->add_option("--alpha", scan_alpha, "assumed smoothness")->capture_default_str();
  scan_cmd->add_option("--delta-c", scan_delta_c, "rate constant")->capture_default_str();
  scan_cmd->add_option("--bw-coef", scan_bw_coef, "bandwidth rule coefficient")
      ->capture_default_str();
  scan_cmd->add_option("--bw-exp", scan_bw_exp, "bandwidth rule exponent")
      ->capture_default_str();

  // delta-scan --------------------------------------------------------------------
  CommonOpts delta_opts;
  std::string delta_grid_text = "0.02:0.3:8";
  std::string delta_param = "delta";
  int delta_reps = 200;
  std::int64_t delta_n = 1255;
  double delta_alpha = 3.0, delta_bandwidth = 0.085, delta_value = 0.1;
  CLI::App* delta_cmd = app.add_subcommand(
      "delta-scan", "MSE against the localization parameter (or bandwidth)");
  add_common(delta_cmd, delta_opts);
  delta_cmd->add_option("--grid", delta_grid_text, "parameter grid: list or start:stop:count")
      ->capture_default_str();
  delta_cmd->add_option("--param", delta_param, "delta | bandwidth")->capture_default_str();
  delta_cmd->add_option("--reps", delta_reps, "replications per grid point")
      ->capture_default_str();
  delta_cmd->add_option("--n", delta_n, "total budget")->capture_default_str();
  delta_cmd->add_option("--alpha", delta_alpha, "assumed smoothness")->capture_default_str();
  delta_cmd->add_option("--bandwidth", delta_bandwidth, "stage-1 bandwidth")
      ->capture_default_str();
  delta_cmd->add_option("--delta", delta_value, "fixed delta for bandwidth scans")
      ->capture_default_str();
  double delta_baseline_bw = 0.0;
  std::int64_t delta_baseline_n = 0;
  delta_cmd->add_option("--baseline-bandwidth", delta_baseline_bw,
                        "also run the single-stage reference at this bandwidth");
  delta_cmd->add_option("--baseline-n", delta_baseline_n,
                        "budget for the reference (default: same as --n)");

  try {
    app.parse(argc, argv);

    for (CLI::App* cmd : {two_stage, multi_stage}) {
      if (!cmd->parsed()) continue;
      EstimatorConfig cfg;
      cfg.alpha = est_alpha;
      cfg.upsilon = est_upsilon;
      cfg.delta_rule = cmd->count("--delta") > 0 ? DeltaRule::explicit_value(est_delta)
                                                 : DeltaRule::rate(est_delta_c);
      cfg.smoother.bandwidth = est_bandwidth;
      cfg.smoother.eval_grid_per_dim = est_eval_grid;
      if (est_kernel == "gaussian") {
        cfg.smoother.kernel = Kernel::kGaussian;
      } else if (est_kernel != "tricube") {
        throw ConfigError("unknown kernel: " + est_kernel);
      }
      cfg.stages = cmd == multi_stage ? est_stages : 2;
      cfg.keep_stage1_surface = true;
      return run_estimate(est_opts, cmd->get_name(), est_n, cfg);
    }

    if (fit_cmd->parsed()) {
      const auto dir = ensure_out_dir(fit_opts);
      TestFunction truth = builtin_function(fit_opts.fn, fit_opts.dim);
      const std::vector<double> center = parse_point(fit_center);
      const int r_alpha = holder_order(fit_alpha);
      const int l = stage2_zoom_level(r_alpha);

      json config{{"fn", fit_opts.fn},  {"center", center},        {"delta", fit_delta},
                  {"alpha", fit_alpha}, {"n", fit_n},              {"sigma", fit_opts.sigma},
                  {"seed", fit_opts.seed}};
      write_manifest(dir, "fit", config);

      SamplingOracle oracle(truth, fit_opts.sigma, fit_opts.seed, fit_n);
      const DesignPlan plan = stage2_design(center, fit_delta, l, fit_n, truth.domain);
      std::vector<double> responses;
      for (std::size_t j = 0; j < plan.points.size(); ++j) {
        for (std::int64_t t = 0; t < plan.replications[j]; ++t) {
          responses.push_back(oracle.sample(plan.points[j]));
        }
      }
      const FitResult fit = fit_polynomial(plan, responses, r_alpha);
      {
        auto os = csv::open_out((dir / "fit.csv").string());
        write_fit_csv(fit, os);
      }
      {
        auto os = csv::open_out((dir / "plan.csv").string());
        write_plan_csv(plan, os);
      }
      std::cout << "fitted " << fit.theta_hat.coefficients().size()
                << " coefficients; condition = " << csv::fmt(fit.condition_estimate)
                << ", residual = " << csv::fmt(fit.residual_norm) << "\n";
      return 0;
    }

    if (baseline_cmd->parsed()) {
      const auto dir = ensure_out_dir(base_opts);
      TestFunction truth = builtin_function(base_opts.fn, base_opts.dim);
      json config{{"fn", base_opts.fn},          {"n", base_n},
                  {"bandwidth", base_bandwidth}, {"eval_grid_per_dim", base_eval_grid},
                  {"sigma", base_opts.sigma},    {"seed", base_opts.seed}};
      write_manifest(dir, "baseline", config);

      SamplingOracle oracle(truth, base_opts.sigma, base_opts.seed, base_n);
      SmootherConfig smoother;
      smoother.bandwidth = base_bandwidth;
      smoother.eval_grid_per_dim = base_eval_grid;
      const EstimateResult result =
          single_stage_baseline(oracle, truth.domain, base_n, smoother);
      write_text(dir / "result.json", to_json(result).dump(2) + "\n");
      if (result.stage1) {
        auto os = csv::open_out((dir / "stage1_surface.csv").string());
        write_surface_csv(*result.stage1, os);
      }
      std::cout << "mu_hat =";
      for (double c : result.mu_hat) std::cout << " " << csv::fmt(c);
      std::cout << "\nM_hat = " << csv::fmt(result.M_hat) << "\n";
      return 0;
    }

    if (sec5_cmd->parsed()) {
      const auto dir = ensure_out_dir(sec5_opts);
      Sec5Config config;
      config.replications = sec5_reps;
      config.base_seed = sec5_opts.seed;
      config.threads = sec5_opts.threads;
      json cj{{"reps", sec5_reps},
              {"seed", sec5_opts.seed},
              {"two_stage_budget", "25x25 + 9x70 = 1255"},
              {"baseline_budget", "36x36 = 1296"},
              {"bandwidth", config.bandwidth},
              {"delta", config.delta},
              {"baseline_bandwidths", config.baseline_bandwidths}};
      write_manifest(dir, "replicate-sec5", cj);

      const Sec5Comparison cmp = replicate_sec5(config);
      {
        auto os = csv::open_out((dir / "two_stage.csv").string());
        write_records_csv(cmp.two_stage, os);
      }
      json out;
      out["two_stage"] = summary_json(cmp.two_stage);
      for (const auto& [h, summary] : cmp.baselines) {
        std::ostringstream name;
        name << "baseline_h" << h;
        out[name.str()] = summary_json(summary);
        auto os = csv::open_out((dir / (name.str() + ".csv")).string());
        write_records_csv(summary, os);
      }
      out["best_baseline_bandwidth"] = cmp.best_baseline_bandwidth;
      out["budgets"] = {{"two_stage", cmp.two_stage_budget},
                        {"baseline", cmp.baseline_budget}};
      write_text(dir / "comparison.json", out.dump(2) + "\n");

      std::cout << "two-stage (n=" << cmp.two_stage_budget
                << ") median sq mu error = " << csv::fmt(cmp.two_stage.sq_mu.median)
                << "\nbaseline  (n=" << cmp.baseline_budget
                << ") best median sq mu error = "
                << csv::fmt(cmp.best_baseline_median_sq_mu)
                << " at h = " << cmp.best_baseline_bandwidth << "\n"
                << (cmp.two_stage.sq_mu.median < cmp.best_baseline_median_sq_mu
                        ? "two-stage improves on the single-stage baseline\n"
                        : "two-stage did NOT improve on the baseline\n");
      return 0;
    }

    if (scan_cmd->parsed()) {
      const auto dir = ensure_out_dir(scan_opts);
      RateScanSpec spec;
      if (scan_opts.fn == "quad" && scan_opts.dim <= 1) {
        // wide-domain univariate quadratic keeps every rate-rule cube feasible
        spec.truth = make_quadratic({0.3}, -2.0 * Eigen::MatrixXd::Identity(1, 1), 1.0,
                                    Domain{{-2.0}, {2.0}});
      } else {
        spec.truth = builtin_function(scan_opts.fn, scan_opts.dim);
      }
      spec.sigma = scan_opts.sigma;
      spec.n_grid = parse_n_grid(scan_n_grid);
      spec.replications_per_n = scan_reps;
      spec.alpha = scan_alpha;
      spec.delta_c = scan_delta_c;
      spec.bandwidth_coef = scan_bw_coef;
      spec.bandwidth_exp = scan_bw_exp;
      spec.base_seed = scan_opts.seed;
      spec.threads = scan_opts.threads;

      json cj{{"fn", scan_opts.fn},      {"n_grid", spec.n_grid}, {"reps", scan_reps},
              {"alpha", scan_alpha},     {"delta_c", scan_delta_c},
              {"bw_coef", scan_bw_coef}, {"bw_exp", scan_bw_exp},
              {"sigma", scan_opts.sigma}, {"seed", scan_opts.seed}};
      write_manifest(dir, "rate-scan", cj);

      const RateScanResult result = rate_scan(spec);
      {
        auto os = csv::open_out((dir / "rate_scan.csv").string());
        write_rate_scan_csv(result, os);
      }
      std::cout << "n, rmse_mu, rmse_M\n";
      for (const auto& row : result.rows) {
        std::cout << row.n << ", " << csv::fmt(row.rmse_mu) << ", "
                  << csv::fmt(row.rmse_M) << "\n";
      }
      std::cout << "slope(mu) = " << csv::fmt(result.mu_fit.slope) << " (se "
                << csv::fmt(result.mu_fit.slope_se) << "), target "
                << csv::fmt(result.mu_target) << "\n";
      std::cout << "slope(M)  = " << csv::fmt(result.M_fit.slope) << " (se "
                << csv::fmt(result.M_fit.slope_se) << "), target "
                << csv::fmt(result.M_target) << "\n";
      return 0;
    }

    if (delta_cmd->parsed()) {
      const auto dir = ensure_out_dir(delta_opts);
      ExperimentSpec spec;
      spec.truth = builtin_function(delta_opts.fn, delta_opts.dim);
      spec.sigma = delta_opts.sigma;
      spec.method = Method::kTwoStage;
      spec.budget = delta_n;
      spec.estimator.alpha = delta_alpha;
      spec.estimator.upsilon = delta_n == 1255 ? 625.0 / 1255.0 : 0.5;
      spec.estimator.delta_rule = DeltaRule::explicit_value(delta_value);
      spec.estimator.smoother.bandwidth = delta_bandwidth;
      spec.replications = delta_reps;
      spec.base_seed = delta_opts.seed;
      spec.threads = delta_opts.threads;

      const std::vector<double> grid = parse_grid(delta_grid_text);
      json cj{{"fn", delta_opts.fn},       {"param", delta_param},
              {"grid", grid},              {"reps", delta_reps},
              {"n", delta_n},              {"alpha", delta_alpha},
              {"sigma", delta_opts.sigma}, {"seed", delta_opts.seed}};
      write_manifest(dir, "delta-scan", cj);

      const std::vector<SensitivityRow> rows = delta_param == "bandwidth"
                                                   ? bandwidth_sensitivity(spec, grid)
                                                   : delta_sensitivity(spec, grid);
      std::optional<double> baseline_ref;
      if (delta_baseline_bw > 0.0) {
        ExperimentSpec ref = spec;
        ref.method = Method::kBaseline;
        ref.budget = delta_baseline_n > 0 ? delta_baseline_n : delta_n;
        ref.baseline_smoother.bandwidth = delta_baseline_bw;
        baseline_ref = run_mc(ref).sq_mu.median;
      }
      {
        auto os = csv::open_out((dir / "sensitivity.csv").string());
        write_sensitivity_csv(rows, delta_param, baseline_ref, os);
      }
      std::cout << delta_param << ", median_sq_mu\n";
      for (const auto& row : rows) {
        std::cout << csv::fmt(row.param) << ", " << csv::fmt(row.median_sq_mu) << "\n";
      }
      if (baseline_ref) {
        std::cout << "baseline reference median_sq_mu = " << csv::fmt(*baseline_ref) << "\n";
      }
      return 0;
    }

    return 0;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
