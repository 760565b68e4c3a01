#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "peakfit/lsq.hpp"
#include "peakfit/maximize.hpp"
#include "peakfit/oracle.hpp"
#include "peakfit/stage1.hpp"

namespace peakfit {

struct DeltaRule {
  enum class Kind { kExplicit, kRate };
  Kind kind = Kind::kRate;
  double value = 1.0;  // the explicit delta, or the rate constant c

  static DeltaRule explicit_value(double delta) { return {Kind::kExplicit, delta}; }
  static DeltaRule rate(double c) { return {Kind::kRate, c}; }
};

struct EstimatorConfig {
  double alpha = 3.0;     // assumed smoothness, > 2
  double upsilon = 0.5;   // stage-1 budget fraction, in (0,1)
  DeltaRule delta_rule = DeltaRule::rate(1.0);
  SmootherConfig smoother;
  MaximizerConfig maximizer;
  int stages = 2;         // 2 = the plain two-stage procedure
  double m_n_scale = 1.0; // slowly varying factor m_n = scale * log n
  bool keep_stage1_surface = false;  // retain the fitted surface for export
};

struct StageLedger {
  std::string stage;
  std::int64_t requested = 0;
  std::int64_t used = 0;
  std::int64_t unused = 0;
};

struct EstimateDiagnostics {
  bool interior_certified = false;  // gradient ~ 0 and Hessian negative definite
  bool in_shrunken_cube = false;    // argmax inside C(2 l delta / 3)
  bool stage1_degenerate = false;
  bool cube_translated = false;
  std::vector<double> cube_shift;   // final stage translation
  double fit_condition = 0.0;
  bool outside_optimal_regime = false;  // alpha <= 1 + sqrt(1 + d/2)
  std::vector<double> delta_trace;      // per zoom stage
  std::vector<StageLedger> budget;
  std::int64_t total_used = 0;
};

struct EstimateResult {
  std::vector<double> mu_hat;
  double M_hat = 0.0;
  std::optional<FitResult> fit;  // final-stage fit; empty for the baseline
  std::optional<MaxResult> max_info;
  std::vector<std::vector<double>> center_trace;  // mu_tilde, then actual zoom centers
  std::vector<std::pair<MultiIndex, double>> derivative_estimates;
  std::optional<Stage1Result> stage1;  // kept when the config asks for it
  EstimateDiagnostics diagnostics;
};

// delta for a budget of n: the explicit rule returns its constant, the rate
// rule returns c * n^{-1/(2 alpha)}. With an accuracy proxy epsilon_hat the
// rate rule applies the multi-stage schedule max(m_n epsilon_hat, c n^{-1/(2 alpha)})
// with m_n = m_scale * log n.
double select_delta(std::int64_t n, double alpha, const DeltaRule& rule,
                    std::optional<double> epsilon_hat = std::nullopt,
                    double m_scale = 1.0);

// True when alpha > 1 + sqrt(1 + d/2): the smoothness regime where the
// staged estimator attains the sequential-optimal rates
// n^{-(alpha-1)/(2 alpha)} for the maximizer and n^{-1/2} for the maximum.
bool in_optimal_rate_regime(double alpha, int d);

// Zoom stages needed so a preliminary rate n^{-gamma} iterates past the
// sequential-optimal exponent (alpha-1)/(2 alpha) for estimating the
// maximizer: smallest k with gamma (alpha-1)^k strictly above the target,
// strict because the schedule's slowly varying factor spoils equality.
int required_zoom_stages_mu(double gamma, double alpha);

// Zoom stages for the adaptive maximum-value rule starting from the
// one-stage rate n^{-1/(4+d)}: smallest integer greater than
// log2(4+d) - 1, computed in exact integer arithmetic.
int adaptive_m_zoom_stages(int d);

// Steps 1-5: stage-1 grid and smoother argmax, then one symmetric zoom,
// polynomial fit of order r_alpha, and maximization over C(l delta).
EstimateResult two_stage_estimate(SamplingOracle& oracle, const Domain& domain,
                                  std::int64_t n, const EstimatorConfig& config);

// Iterated zooming: stage 1 takes round(upsilon n); the remainder splits
// equally across the stages-1 zoom passes, each re-centered on the previous
// estimate with the delta schedule applied (never increasing).
EstimateResult multi_stage_estimate(SamplingOracle& oracle, const Domain& domain,
                                    std::int64_t n, const EstimatorConfig& config);

// D^i f_theta_hat(mu_ring) for each requested index of degree <= r_alpha.
std::vector<std::pair<MultiIndex, double>> estimate_derivatives(
    const FitResult& fit, std::span<const double> mu_ring,
    const std::vector<MultiIndex>& indices);

nlohmann::json to_json(const EstimateResult& result);

}  // namespace peakfit
