#include "peakfit/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <ostream>
#include <thread>

#include "peakfit/csv.hpp"
#include "peakfit/errors.hpp"

namespace peakfit {

namespace {

double quantile(std::vector<double> v, double p) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const double h = p * (static_cast<double>(v.size()) - 1.0);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, v.size() - 1);
  const double frac = h - static_cast<double>(lo);
  return v[lo] + frac * (v[hi] - v[lo]);
}

ErrorStats stats_of(std::vector<double> values) {
  ErrorStats s;
  if (values.empty()) {
    s.mean = s.median = s.q25 = s.q75 = std::numeric_limits<double>::quiet_NaN();
    return s;
  }
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  s.median = quantile(values, 0.5);
  s.q25 = quantile(values, 0.25);
  s.q75 = quantile(values, 0.75);
  return s;
}

}  // namespace

EstimateResult single_stage_baseline(SamplingOracle& oracle, const Domain& domain,
                                     std::int64_t n, const SmootherConfig& config) {
  const DesignPlan grid = stage1_grid(domain, n);
  std::vector<Sample> data;
  data.reserve(grid.points.size());
  for (const auto& x : grid.points) data.push_back(Sample{x, oracle.sample(x)});
  Stage1Result s1 = stage1_estimate(data, domain, config);

  EstimateResult result;
  result.mu_hat = s1.mu_tilde;
  result.M_hat = s1.mu_tilde_value;
  result.center_trace.push_back(s1.mu_tilde);
  result.diagnostics.stage1_degenerate = s1.degenerate;
  result.diagnostics.budget.push_back(
      StageLedger{"stage1", grid.requested, grid.total, grid.unused});
  result.diagnostics.total_used = grid.total;
  result.stage1 = std::move(s1);
  return result;
}

McSummary run_mc(const ExperimentSpec& spec) {
  if (spec.replications < 1) throw ConfigError("run_mc: replications must be >= 1");
  if (spec.budget < 2) throw ConfigError("run_mc: budget must be >= 2");
  if (spec.truth.true_mu.empty()) {
    throw ConfigError("run_mc: the truth must carry a recorded maximizer");
  }

  McSummary summary;
  summary.budget = spec.budget;
  summary.records.resize(static_cast<std::size_t>(spec.replications));

  std::atomic<int> next{0};
  auto worker = [&]() {
    while (true) {
      const int j = next.fetch_add(1);
      if (j >= spec.replications) return;
      RepRecord rec;
      rec.rep = j;
      rec.seed = spec.base_seed + static_cast<std::uint64_t>(j);
      SamplingOracle oracle(spec.truth, spec.sigma, rec.seed, spec.budget);
      try {
        EstimateResult est;
        switch (spec.method) {
          case Method::kTwoStage:
            est = two_stage_estimate(oracle, spec.truth.domain, spec.budget, spec.estimator);
            break;
          case Method::kMultiStage:
            est = multi_stage_estimate(oracle, spec.truth.domain, spec.budget, spec.estimator);
            break;
          case Method::kBaseline:
            est = single_stage_baseline(oracle, spec.truth.domain, spec.budget,
                                        spec.baseline_smoother);
            break;
        }
        rec.ok = true;
        rec.mu_hat = est.mu_hat;
        rec.M_hat = est.M_hat;
        double sq = 0.0;
        for (std::size_t k = 0; k < est.mu_hat.size(); ++k) {
          const double t = est.mu_hat[k] - spec.truth.true_mu[k];
          sq += t * t;
        }
        rec.sq_err_mu = sq;
        const double dm = est.M_hat - spec.truth.true_M;
        rec.sq_err_M = dm * dm;
        rec.interior = est.diagnostics.interior_certified;
        rec.translated = est.diagnostics.cube_translated;
        rec.condition = est.diagnostics.fit_condition;
        rec.used = est.diagnostics.total_used;
      } catch (const std::exception& e) {
        rec.ok = false;
        rec.error = e.what();
      }
      summary.records[static_cast<std::size_t>(j)] = std::move(rec);
    }
  };

  const int threads = std::max(1, spec.threads);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  std::vector<double> sq_mu, sq_M;
  sq_mu.reserve(summary.records.size());
  sq_M.reserve(summary.records.size());
  for (const RepRecord& rec : summary.records) {
    if (!rec.ok) {
      ++summary.failures;
      continue;
    }
    sq_mu.push_back(rec.sq_err_mu);
    sq_M.push_back(rec.sq_err_M);
  }
  summary.sq_mu = stats_of(std::move(sq_mu));
  summary.sq_M = stats_of(std::move(sq_M));
  return summary;
}

void write_records_csv(const McSummary& summary, std::ostream& os) {
  os << "rep,seed,ok,error,mu_hat,M_hat,sq_err_mu,sq_err_M,interior,translated,"
        "condition,used\n";
  for (const RepRecord& rec : summary.records) {
    os << rec.rep << "," << rec.seed << "," << (rec.ok ? 1 : 0) << ",\"" << rec.error
       << "\",\"";
    for (std::size_t k = 0; k < rec.mu_hat.size(); ++k) {
      if (k) os << " ";
      os << csv::fmt(rec.mu_hat[k]);
    }
    os << "\"," << csv::fmt(rec.M_hat) << "," << csv::fmt(rec.sq_err_mu) << ","
       << csv::fmt(rec.sq_err_M) << "," << (rec.interior ? 1 : 0) << ","
       << (rec.translated ? 1 : 0) << "," << csv::fmt(rec.condition) << "," << rec.used
       << "\n";
  }
}

SlopeFit fit_loglog_slope(std::span<const double> ns, std::span<const double> rmses) {
  if (ns.size() != rmses.size() || ns.size() < 3) {
    throw ConfigError("fit_loglog_slope: needs >= 3 matched points");
  }
  SlopeFit fit;
  fit.degenerate = true;
  for (double r : rmses) {
    if (r > 1e-13) fit.degenerate = false;
  }
  if (fit.degenerate) return fit;

  const auto m = static_cast<double>(ns.size());
  double sx = 0.0, sy = 0.0;
  std::vector<double> xs(ns.size()), ys(ns.size());
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (!(ns[i] > 0.0) || !(rmses[i] > 0.0)) {
      throw ConfigError("fit_loglog_slope: inputs must be positive");
    }
    xs[i] = std::log(ns[i]);
    ys[i] = std::log(rmses[i]);
    sx += xs[i];
    sy += ys[i];
  }
  const double xbar = sx / m;
  const double ybar = sy / m;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    sxx += (xs[i] - xbar) * (xs[i] - xbar);
    sxy += (xs[i] - xbar) * (ys[i] - ybar);
  }
  fit.slope = sxy / sxx;
  fit.intercept = ybar - fit.slope * xbar;
  double rss = 0.0;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const double r = ys[i] - fit.intercept - fit.slope * xs[i];
    rss += r * r;
  }
  fit.slope_se = ns.size() > 2 ? std::sqrt(rss / (m - 2.0) / sxx) : 0.0;
  return fit;
}

RateScanResult rate_scan(const RateScanSpec& spec) {
  if (spec.n_grid.size() < 4) throw ConfigError("rate_scan: need >= 4 budgets");
  for (std::size_t i = 1; i < spec.n_grid.size(); ++i) {
    if (spec.n_grid[i] <= spec.n_grid[i - 1]) {
      throw ConfigError("rate_scan: budgets must be strictly increasing");
    }
  }
  const double decades = std::log10(static_cast<double>(spec.n_grid.back()) /
                                    static_cast<double>(spec.n_grid.front()));
  if (decades < 1.5 - 1e-9) {
    throw ConfigError("rate_scan: budget grid must span >= 1.5 decades");
  }

  RateScanResult result;
  result.mu_target = -(spec.alpha - 1.0) / (2.0 * spec.alpha);
  result.M_target = -0.5;

  std::vector<double> ns, rmse_mu, rmse_M;
  for (std::size_t i = 0; i < spec.n_grid.size(); ++i) {
    const std::int64_t n = spec.n_grid[i];
    ExperimentSpec cell;
    cell.truth = spec.truth;
    cell.sigma = spec.sigma;
    cell.method = Method::kTwoStage;
    cell.budget = n;
    cell.estimator.alpha = spec.alpha;
    cell.estimator.delta_rule = DeltaRule::rate(spec.delta_c);
    cell.estimator.smoother.bandwidth =
        spec.bandwidth_coef * std::pow(static_cast<double>(n), spec.bandwidth_exp);
    cell.estimator.smoother.eval_grid_per_dim = spec.eval_grid_per_dim;
    cell.replications = spec.replications_per_n;
    cell.base_seed = spec.base_seed + 1000003ULL * i;
    cell.threads = spec.threads;

    const McSummary summary = run_mc(cell);
    RateScanRow row;
    row.n = n;
    row.delta = select_delta(n, spec.alpha, DeltaRule::rate(spec.delta_c));
    row.rmse_mu = std::sqrt(summary.sq_mu.mean);
    row.rmse_M = std::sqrt(summary.sq_M.mean);
    row.failures = summary.failures;
    result.rows.push_back(row);

    ns.push_back(static_cast<double>(n));
    rmse_mu.push_back(row.rmse_mu);
    rmse_M.push_back(row.rmse_M);
  }
  result.mu_fit = fit_loglog_slope(ns, rmse_mu);
  result.M_fit = fit_loglog_slope(ns, rmse_M);
  return result;
}

void write_rate_scan_csv(const RateScanResult& result, std::ostream& os) {
  os << "n,delta,rmse_mu,rmse_M,failures\n";
  for (const RateScanRow& row : result.rows) {
    os << row.n << "," << csv::fmt(row.delta) << "," << csv::fmt(row.rmse_mu) << ","
       << csv::fmt(row.rmse_M) << "," << row.failures << "\n";
  }
  os << "# slope_mu," << csv::fmt(result.mu_fit.slope) << ",se,"
     << csv::fmt(result.mu_fit.slope_se) << ",target," << csv::fmt(result.mu_target)
     << "\n";
  os << "# slope_M," << csv::fmt(result.M_fit.slope) << ",se,"
     << csv::fmt(result.M_fit.slope_se) << ",target," << csv::fmt(result.M_target)
     << "\n";
}

namespace {

std::vector<SensitivityRow> sweep(const ExperimentSpec& base, std::span<const double> grid,
                                  void (*apply)(ExperimentSpec&, double)) {
  std::vector<SensitivityRow> rows;
  rows.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    ExperimentSpec spec = base;
    apply(spec, grid[i]);
    const McSummary summary = run_mc(spec);
    rows.push_back(SensitivityRow{grid[i], summary.sq_mu.median, summary.sq_mu.mean,
                                  summary.sq_M.median, summary.failures});
  }
  return rows;
}

}  // namespace

std::vector<SensitivityRow> delta_sensitivity(const ExperimentSpec& spec,
                                              std::span<const double> delta_grid) {
  return sweep(spec, delta_grid, [](ExperimentSpec& s, double delta) {
    s.estimator.delta_rule = DeltaRule::explicit_value(delta);
  });
}

std::vector<SensitivityRow> bandwidth_sensitivity(const ExperimentSpec& spec,
                                                  std::span<const double> bandwidth_grid) {
  return sweep(spec, bandwidth_grid, [](ExperimentSpec& s, double h) {
    s.estimator.smoother.bandwidth = h;
    s.baseline_smoother.bandwidth = h;
  });
}

void write_sensitivity_csv(std::span<const SensitivityRow> rows, const std::string& param,
                           std::optional<double> baseline_ref, std::ostream& os) {
  os << param << ",median_sq_mu,mean_sq_mu,median_sq_M,failures\n";
  for (const SensitivityRow& row : rows) {
    os << csv::fmt(row.param) << "," << csv::fmt(row.median_sq_mu) << ","
       << csv::fmt(row.mean_sq_mu) << "," << csv::fmt(row.median_sq_M) << ","
       << row.failures << "\n";
  }
  if (baseline_ref) {
    os << "# baseline_median_sq_mu," << csv::fmt(*baseline_ref) << "\n";
  }
}

ExperimentSpec sec5_two_stage_spec(const Sec5Config& config) {
  ExperimentSpec spec;
  spec.truth = make_sec5();
  spec.sigma = 0.1;
  spec.method = Method::kTwoStage;
  spec.budget = 1255;  // 25x25 + 9x70
  spec.estimator.alpha = 3.0;
  spec.estimator.upsilon = 625.0 / 1255.0;
  spec.estimator.delta_rule = DeltaRule::explicit_value(config.delta);
  spec.estimator.smoother.bandwidth = config.bandwidth;
  spec.estimator.smoother.eval_grid_per_dim = 25;
  spec.replications = config.replications;
  spec.base_seed = config.base_seed;
  spec.threads = config.threads;
  return spec;
}

ExperimentSpec sec5_baseline_spec(const Sec5Config& config, double bandwidth) {
  ExperimentSpec spec;
  spec.truth = make_sec5();
  spec.sigma = 0.1;
  spec.method = Method::kBaseline;
  spec.budget = 1296;  // 36x36
  spec.baseline_smoother.bandwidth = bandwidth;
  spec.baseline_smoother.eval_grid_per_dim = 36;
  spec.replications = config.replications;
  spec.base_seed = config.base_seed;
  spec.threads = config.threads;
  return spec;
}

Sec5Comparison replicate_sec5(const Sec5Config& config) {
  Sec5Comparison cmp;
  cmp.two_stage = run_mc(sec5_two_stage_spec(config));
  cmp.two_stage_budget = 1255;
  cmp.baseline_budget = 1296;
  cmp.best_baseline_median_sq_mu = std::numeric_limits<double>::infinity();
  for (double h : config.baseline_bandwidths) {
    McSummary summary = run_mc(sec5_baseline_spec(config, h));
    if (summary.sq_mu.median < cmp.best_baseline_median_sq_mu) {
      cmp.best_baseline_median_sq_mu = summary.sq_mu.median;
      cmp.best_baseline_bandwidth = h;
    }
    cmp.baselines.emplace_back(h, std::move(summary));
  }
  return cmp;
}

}  // namespace peakfit
