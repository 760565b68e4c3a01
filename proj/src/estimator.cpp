#include "peakfit/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "peakfit/errors.hpp"

namespace peakfit {

namespace {

void validate(const EstimatorConfig& cfg) {
  if (!(cfg.alpha > 2.0)) throw ConfigError("estimator: alpha must be > 2");
  if (!(cfg.upsilon > 0.0 && cfg.upsilon < 1.0)) {
    throw ConfigError("estimator: upsilon must be in (0,1)");
  }
  if (cfg.stages < 2) throw ConfigError("estimator: stages must be >= 2");
  if (!(cfg.delta_rule.value > 0.0)) throw ConfigError("estimator: delta rule value must be positive");
  if (!(cfg.m_n_scale > 0.0)) throw ConfigError("estimator: m_n_scale must be positive");
}

}  // namespace

double select_delta(std::int64_t n, double alpha, const DeltaRule& rule,
                    std::optional<double> epsilon_hat, double m_scale) {
  if (n < 2) throw ConfigError("select_delta: n must be >= 2");
  if (!(alpha > 2.0)) throw ConfigError("select_delta: alpha must be > 2");
  if (rule.kind == DeltaRule::Kind::kExplicit) return rule.value;
  const double floor_delta =
      rule.value * std::pow(static_cast<double>(n), -1.0 / (2.0 * alpha));
  if (!epsilon_hat) return floor_delta;
  const double m_n = m_scale * std::log(static_cast<double>(n));
  return std::max(m_n * *epsilon_hat, floor_delta);
}

bool in_optimal_rate_regime(double alpha, int d) {
  return alpha > 1.0 + std::sqrt(1.0 + d / 2.0);
}

int required_zoom_stages_mu(double gamma, double alpha) {
  if (!(gamma > 0.0)) throw ConfigError("required_zoom_stages_mu: gamma must be positive");
  if (!(alpha > 2.0)) throw ConfigError("required_zoom_stages_mu: alpha must be > 2");
  const double target = (alpha - 1.0) / (2.0 * alpha);
  double rate = gamma;
  for (int k = 0; k <= 64; ++k) {
    if (rate > target * (1.0 + 1e-12)) return k;
    rate *= (alpha - 1.0);
  }
  throw EstimationError("required_zoom_stages_mu: did not converge in 64 stages");
}

int adaptive_m_zoom_stages(int d) {
  if (d < 1) throw ConfigError("adaptive_m_zoom_stages: d must be >= 1");
  // smallest k with 2^(k+1) > 4 + d
  int k = 0;
  std::int64_t pow2 = 2;
  while (pow2 <= 4 + static_cast<std::int64_t>(d)) {
    ++k;
    pow2 *= 2;
  }
  return k;
}

EstimateResult multi_stage_estimate(SamplingOracle& oracle, const Domain& domain,
                                    std::int64_t n, const EstimatorConfig& cfg) {
  domain.validate();
  validate(cfg);
  const int d = domain.dim();
  const int r_alpha = holder_order(cfg.alpha);
  const int l = stage2_zoom_level(r_alpha);
  const int zoom_stages = cfg.stages - 1;

  // budget plan, checked before any sampling
  const BudgetSplit split = split_budget(n, cfg.upsilon);
  if (split.n1 < (std::int64_t{1} << d)) {
    throw ConfigError("estimator: stage-1 budget below 2^d");
  }
  std::int64_t grid_points = 1;
  for (int k = 0; k < d; ++k) grid_points *= (2 * l + 1);
  const std::int64_t per_zoom = split.n2 / zoom_stages;
  const std::int64_t unallocated = split.n2 - per_zoom * zoom_stages;
  if (per_zoom < grid_points) {
    throw ConfigError("estimator: zoom budget below one replication per design point");
  }

  EstimateResult result;
  result.diagnostics.outside_optimal_regime = !in_optimal_rate_regime(cfg.alpha, d);

  // stage 1: quasi-uniform grid, smoother, argmax
  const DesignPlan grid = stage1_grid(domain, split.n1);
  std::vector<Sample> data;
  data.reserve(grid.points.size());
  for (const auto& x : grid.points) {
    data.push_back(Sample{x, oracle.sample(x)});
  }
  Stage1Result s1 = stage1_estimate(data, domain, cfg.smoother);
  result.diagnostics.stage1_degenerate = s1.degenerate;
  result.diagnostics.budget.push_back(
      StageLedger{"stage1", grid.requested, grid.total, grid.unused});
  result.center_trace.push_back(s1.mu_tilde);
  std::vector<double> center = s1.mu_tilde;
  if (cfg.keep_stage1_surface) result.stage1 = std::move(s1);

  double delta = select_delta(n, cfg.alpha, cfg.delta_rule);
  std::optional<FitResult> fit;
  std::optional<MaxResult> max_res;
  DesignPlan plan;

  for (int stage = 1; stage <= zoom_stages; ++stage) {
    if (stage > 1) {
      const double eps_hat = std::pow(delta, cfg.alpha - 1.0);
      const double floor_c =
          cfg.delta_rule.kind == DeltaRule::Kind::kRate ? cfg.delta_rule.value : 1.0;
      const double scheduled = select_delta(n, cfg.alpha, DeltaRule::rate(floor_c),
                                            eps_hat, cfg.m_n_scale);
      delta = std::min(delta, scheduled);  // zooming never widens
    }
    if (2.0 * l * delta < 64.0 * std::numeric_limits<double>::epsilon()) {
      throw PrecisionError("estimator: zoom cube collapsed below floating-point resolution");
    }
    result.diagnostics.delta_trace.push_back(delta);

    plan = stage2_design(center, delta, l, per_zoom, domain);
    std::vector<double> responses;
    responses.reserve(static_cast<std::size_t>(plan.total));
    for (std::size_t j = 0; j < plan.points.size(); ++j) {
      for (std::int64_t t = 0; t < plan.replications[j]; ++t) {
        responses.push_back(oracle.sample(plan.points[j]));
      }
    }
    fit = fit_polynomial(plan, responses, r_alpha);
    max_res = maximize_over_cube(fit->theta_hat, l * delta, cfg.maximizer);

    center = plan.center;
    for (int k = 0; k < d; ++k) {
      center[static_cast<std::size_t>(k)] += max_res->argmax[static_cast<std::size_t>(k)];
    }
    result.center_trace.push_back(plan.center);
    result.diagnostics.budget.push_back(
        StageLedger{"zoom" + std::to_string(stage), per_zoom, plan.total, plan.unused});
  }
  if (unallocated > 0) {
    result.diagnostics.budget.push_back(StageLedger{"unallocated", unallocated, 0, unallocated});
  }

  result.mu_hat = center;  // final center + final argmax, componentwise exact
  result.M_hat = max_res->value;
  result.diagnostics.interior_certified = certify_interior_max(*max_res, fit->theta_hat);
  result.diagnostics.in_shrunken_cube = true;
  for (double z : max_res->argmax) {
    if (std::abs(z) > 2.0 * l * delta / 3.0) result.diagnostics.in_shrunken_cube = false;
  }
  result.diagnostics.cube_translated = plan.translated();
  result.diagnostics.cube_shift = plan.applied_shift;
  result.diagnostics.fit_condition = fit->condition_estimate;
  for (const auto& ledger : result.diagnostics.budget) {
    result.diagnostics.total_used += ledger.used;
  }

  const MultiIndexSet& set = fit->theta_hat.index_set();
  result.derivative_estimates =
      estimate_derivatives(*fit, max_res->argmax, set.indices());
  result.fit = std::move(fit);
  result.max_info = std::move(max_res);
  return result;
}

EstimateResult two_stage_estimate(SamplingOracle& oracle, const Domain& domain,
                                  std::int64_t n, const EstimatorConfig& config) {
  EstimatorConfig cfg = config;
  cfg.stages = 2;
  return multi_stage_estimate(oracle, domain, n, cfg);
}

std::vector<std::pair<MultiIndex, double>> estimate_derivatives(
    const FitResult& fit, std::span<const double> mu_ring,
    const std::vector<MultiIndex>& indices) {
  std::vector<std::pair<MultiIndex, double>> out;
  out.reserve(indices.size());
  const int r = fit.theta_hat.index_set().max_degree();
  for (const MultiIndex& i : indices) {
    if (i.degree() > r) {
      throw ConfigError("estimate_derivatives: index degree exceeds the fit order");
    }
    out.emplace_back(i, fit.theta_hat.mixed_derivative(mu_ring, i));
  }
  return out;
}

nlohmann::json to_json(const EstimateResult& result) {
  nlohmann::json j;
  j["mu_hat"] = result.mu_hat;
  j["M_hat"] = result.M_hat;
  j["center_trace"] = result.center_trace;
  if (result.fit) {
    j["coefficients"] = result.fit->theta_hat.coefficients();
    j["std_errors"] = result.fit->std_errors;
    j["residual_norm"] = result.fit->residual_norm;
    j["sigma_hat"] = result.fit->sigma_hat;
  }
  if (result.max_info) {
    j["argmax_shifted"] = result.max_info->argmax;
    j["newton_iterations"] = result.max_info->iterations;
    j["on_boundary"] = result.max_info->on_boundary;
  }
  nlohmann::json derivs = nlohmann::json::object();
  for (const auto& [index, value] : result.derivative_estimates) {
    std::string key;
    for (int k = 0; k < index.dim(); ++k) {
      if (k) key += " ";
      key += std::to_string(index[k]);
    }
    derivs[key] = value;
  }
  j["derivative_estimates"] = derivs;

  const EstimateDiagnostics& diag = result.diagnostics;
  nlohmann::json dj;
  dj["interior_certified"] = diag.interior_certified;
  dj["in_shrunken_cube"] = diag.in_shrunken_cube;
  dj["stage1_degenerate"] = diag.stage1_degenerate;
  dj["cube_translated"] = diag.cube_translated;
  dj["cube_shift"] = diag.cube_shift;
  dj["fit_condition"] = diag.fit_condition;
  dj["outside_optimal_regime"] = diag.outside_optimal_regime;
  dj["delta_trace"] = diag.delta_trace;
  dj["total_used"] = diag.total_used;
  nlohmann::json budget = nlohmann::json::array();
  for (const auto& row : diag.budget) {
    budget.push_back({{"stage", row.stage},
                      {"requested", row.requested},
                      {"used", row.used},
                      {"unused", row.unused}});
  }
  dj["budget"] = budget;
  j["diagnostics"] = dj;
  return j;
}

}  // namespace peakfit
