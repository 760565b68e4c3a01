#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "peakfit/estimator.hpp"
#include "peakfit/oracle.hpp"

namespace peakfit {

enum class Method { kTwoStage, kMultiStage, kBaseline };

// One Monte Carlo cell: a truth, a noise level, an estimator, a budget.
// Replications run independently with derived seeds base_seed + j and may be
// spread over any number of threads; records are kept in replication order,
// so output files are byte-identical across worker counts.
struct ExperimentSpec {
  TestFunction truth;
  double sigma = 0.1;
  Method method = Method::kTwoStage;
  std::int64_t budget = 0;
  EstimatorConfig estimator;
  SmootherConfig baseline_smoother;  // used when method == kBaseline
  int replications = 500;
  std::uint64_t base_seed = 1;
  int threads = 1;
};

struct RepRecord {
  int rep = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  std::vector<double> mu_hat;
  double M_hat = 0.0;
  double sq_err_mu = 0.0;
  double sq_err_M = 0.0;
  bool interior = false;
  bool translated = false;
  double condition = 0.0;
  std::int64_t used = 0;
};

struct ErrorStats {
  double mean = 0.0;
  double median = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;
};

struct McSummary {
  std::vector<RepRecord> records;
  int failures = 0;
  ErrorStats sq_mu;  // statistics of ||mu_hat - mu||^2 over successful reps
  ErrorStats sq_M;   // statistics of (M_hat - M)^2
  std::int64_t budget = 0;
};

McSummary run_mc(const ExperimentSpec& spec);

void write_records_csv(const McSummary& summary, std::ostream& os);

// Full-budget regular grid, local linear fit, argmax with refinement;
// M_hat is the fitted value at mu_hat.
EstimateResult single_stage_baseline(SamplingOracle& oracle, const Domain& domain,
                                     std::int64_t n, const SmootherConfig& config);

// OLS of log(rmse) on log(n); degenerate when every rmse sits at the
// floating-point floor.
struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
  bool degenerate = false;
};

SlopeFit fit_loglog_slope(std::span<const double> ns, std::span<const double> rmses);

// Budget sweep with delta = c n^{-1/(2 alpha)} and a shrinking stage-1
// bandwidth h(n) = bandwidth_coef * n^bandwidth_exp.
struct RateScanSpec {
  TestFunction truth;
  double sigma = 0.1;
  std::vector<std::int64_t> n_grid;  // >= 4 budgets spanning >= 1.5 decades
  int replications_per_n = 200;
  double alpha = 4.0;
  double delta_c = 1.0;
  double bandwidth_coef = 1.0;
  double bandwidth_exp = -0.2;
  int eval_grid_per_dim = 33;
  std::uint64_t base_seed = 1;
  int threads = 1;
};

struct RateScanRow {
  std::int64_t n = 0;
  double delta = 0.0;
  double rmse_mu = 0.0;
  double rmse_M = 0.0;
  int failures = 0;
};

struct RateScanResult {
  std::vector<RateScanRow> rows;
  SlopeFit mu_fit;
  SlopeFit M_fit;
  double mu_target = 0.0;  // -(alpha-1)/(2 alpha)
  double M_target = -0.5;
};

RateScanResult rate_scan(const RateScanSpec& spec);

void write_rate_scan_csv(const RateScanResult& result, std::ostream& os);

// MSE curves against a tuning parameter, with the single-stage reference.
struct SensitivityRow {
  double param = 0.0;
  double median_sq_mu = 0.0;
  double mean_sq_mu = 0.0;
  double median_sq_M = 0.0;
  int failures = 0;
};

std::vector<SensitivityRow> delta_sensitivity(const ExperimentSpec& spec,
                                              std::span<const double> delta_grid);
std::vector<SensitivityRow> bandwidth_sensitivity(const ExperimentSpec& spec,
                                                  std::span<const double> bandwidth_grid);

void write_sensitivity_csv(std::span<const SensitivityRow> rows, const std::string& param,
                           std::optional<double> baseline_ref, std::ostream& os);

// The simulation-study comparison: two-stage 25x25 + 9x70 = 1255 samples
// (h = 0.085, delta = 0.1) against a 36x36 = 1296 single-stage grid with the
// bandwidth scanned and the best taken.
struct Sec5Config {
  int replications = 500;
  std::uint64_t base_seed = 1;
  int threads = 1;
  double bandwidth = 0.085;
  double delta = 0.1;
  std::vector<double> baseline_bandwidths = {0.07, 0.085, 0.10};
};

struct Sec5Comparison {
  McSummary two_stage;
  std::vector<std::pair<double, McSummary>> baselines;
  double best_baseline_bandwidth = 0.0;
  double best_baseline_median_sq_mu = 0.0;
  std::int64_t two_stage_budget = 0;
  std::int64_t baseline_budget = 0;
};

ExperimentSpec sec5_two_stage_spec(const Sec5Config& config);
ExperimentSpec sec5_baseline_spec(const Sec5Config& config, double bandwidth);
Sec5Comparison replicate_sec5(const Sec5Config& config);

}  // namespace peakfit
