#include "peakfit/stage1.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "peakfit/csv.hpp"
#include "peakfit/errors.hpp"

namespace peakfit {

namespace {

double kernel_weight(Kernel kernel, double u) {
  switch (kernel) {
    case Kernel::kTricube: {
      if (u >= 1.0) return 0.0;
      const double t = 1.0 - u * u * u;
      return t * t * t;
    }
    case Kernel::kGaussian:
      return std::exp(-0.5 * u * u);
  }
  return 0.0;
}

void validate_config(const SmootherConfig& config) {
  if (!(config.bandwidth > 0.0)) throw ConfigError("smoother: bandwidth must be positive");
  if (config.eval_grid_per_dim < 8) {
    throw ConfigError("smoother: eval grid must be >= 8 per dimension");
  }
}

struct LocalFit {
  double value = 0.0;
  double n_eff = 0.0;
};

// Weighted least squares of y on (1, (x - x0)/h). Scaling the regressors by
// the bandwidth keeps the normal equations well conditioned; the intercept
// is unchanged.
LocalFit local_linear_fit_impl(std::span<const Sample> data,
                               std::span<const double> x0,
                               const SmootherConfig& config) {
  const int d = static_cast<int>(x0.size());
  const double h = config.bandwidth;
  const int p = d + 1;

  Eigen::MatrixXd ata = Eigen::MatrixXd::Zero(p, p);
  Eigen::VectorXd atb = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd row(p);
  double wsum = 0.0, w2sum = 0.0;
  std::int64_t positive = 0;

  for (const Sample& s : data) {
    if (static_cast<int>(s.x.size()) != d) {
      throw ConfigError("local_linear_fit: sample dimension mismatch");
    }
    double dist2 = 0.0;
    for (int k = 0; k < d; ++k) {
      const double t = s.x[static_cast<std::size_t>(k)] - x0[static_cast<std::size_t>(k)];
      dist2 += t * t;
    }
    const double w = kernel_weight(config.kernel, std::sqrt(dist2) / h);
    if (w <= 0.0) continue;
    ++positive;
    wsum += w;
    w2sum += w * w;
    row(0) = 1.0;
    for (int k = 0; k < d; ++k) {
      row(k + 1) = (s.x[static_cast<std::size_t>(k)] - x0[static_cast<std::size_t>(k)]) / h;
    }
    ata.noalias() += w * row * row.transpose();
    atb += w * s.y * row;
  }

  if (positive < d + 2) {
    throw RankError("local_linear_fit: fewer than d+2 points carry weight; bandwidth too small");
  }

  Eigen::LDLT<Eigen::MatrixXd> ldlt(ata);
  const Eigen::VectorXd diag = ldlt.vectorD();
  const double dmax = diag.cwiseAbs().maxCoeff();
  if (ldlt.info() != Eigen::Success || !(dmax > 0.0) ||
      diag.minCoeff() <= 1e-12 * dmax) {
    throw RankError("local_linear_fit: rank-deficient local system; bandwidth too small");
  }
  const Eigen::VectorXd beta = ldlt.solve(atb);
  return LocalFit{beta(0), wsum * wsum / w2sum};
}

}  // namespace

double local_linear_fit(std::span<const Sample> data, std::span<const double> x0,
                        const SmootherConfig& config) {
  validate_config(config);
  return local_linear_fit_impl(data, x0, config).value;
}

Stage1Result stage1_estimate(std::span<const Sample> data, const Domain& domain,
                             const SmootherConfig& config) {
  domain.validate();
  validate_config(config);
  if (data.empty()) throw ConfigError("stage1_estimate: no data");
  for (const Sample& s : data) {
    if (!domain.contains(s.x)) {
      throw ConfigError("stage1_estimate: data point outside the domain");
    }
  }

  const int d = domain.dim();
  const int g = config.eval_grid_per_dim;
  const double nan = std::numeric_limits<double>::quiet_NaN();

  Stage1Result result;
  std::vector<double> spacing(static_cast<std::size_t>(d));
  for (int k = 0; k < d; ++k) {
    spacing[static_cast<std::size_t>(k)] = domain.edge(k) / g;
  }

  // evaluation grid at cell centers, dictionary order
  std::int64_t npts = 1;
  for (int k = 0; k < d; ++k) npts *= g;
  result.surface.reserve(static_cast<std::size_t>(npts));

  std::vector<int> digit(static_cast<std::size_t>(d), 0);
  std::vector<int> best_digit;
  double best_value = -std::numeric_limits<double>::infinity();
  double worst_value = std::numeric_limits<double>::infinity();
  std::ptrdiff_t best_pos = -1;
  while (true) {
    Stage1Result::GridValue gv;
    gv.point.resize(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k) {
      const auto ku = static_cast<std::size_t>(k);
      gv.point[ku] = domain.lower[ku] + domain.edge(k) * (2.0 * digit[ku] + 1.0) / (2.0 * g);
    }
    try {
      const LocalFit fit = local_linear_fit_impl(data, gv.point, config);
      gv.value = fit.value;
      gv.n_eff = fit.n_eff;
      // strict improvement keeps the dictionary-smallest point on ties
      if (gv.value > best_value) {
        best_value = gv.value;
        best_digit = digit;
        best_pos = static_cast<std::ptrdiff_t>(result.surface.size());
      }
      worst_value = std::min(worst_value, gv.value);
    } catch (const RankError&) {
      gv.value = nan;
      gv.n_eff = 0.0;
    }
    result.surface.push_back(std::move(gv));
    int k = d - 1;
    while (k >= 0 && digit[static_cast<std::size_t>(k)] == g - 1) {
      digit[static_cast<std::size_t>(k)] = 0;
      --k;
    }
    if (k < 0) break;
    ++digit[static_cast<std::size_t>(k)];
  }

  if (best_pos < 0) {
    throw EstimationError("stage1_estimate: all local fits failed; bandwidth too small everywhere");
  }
  result.degenerate = (best_value - worst_value) <= 1e-12 * (1.0 + std::abs(best_value));

  const std::vector<double>& best_point =
      result.surface[static_cast<std::size_t>(best_pos)].point;
  result.mu_tilde = best_point;
  result.mu_tilde_value = best_value;

  // one coordinatewise parabolic-vertex refinement over the neighboring
  // grid values, clamped to the adjacent cells; skipped at the grid edge
  std::vector<double> refined = best_point;
  std::int64_t stride = 1;
  std::vector<std::int64_t> strides(static_cast<std::size_t>(d));
  for (int k = d - 1; k >= 0; --k) {
    strides[static_cast<std::size_t>(k)] = stride;
    stride *= g;
  }
  std::int64_t flat = 0;
  for (int k = 0; k < d; ++k) {
    flat += best_digit[static_cast<std::size_t>(k)] * strides[static_cast<std::size_t>(k)];
  }
  for (int k = 0; k < d; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    const int t = best_digit[ku];
    if (t == 0 || t == g - 1) continue;
    const double lo = result.surface[static_cast<std::size_t>(flat - strides[ku])].value;
    const double hi = result.surface[static_cast<std::size_t>(flat + strides[ku])].value;
    if (std::isnan(lo) || std::isnan(hi)) continue;
    const double denom = lo + hi - 2.0 * best_value;
    if (!(denom < 0.0)) continue;  // flat or tied: keep the grid coordinate
    const double h = spacing[ku];
    double off = 0.5 * h * (lo - hi) / denom;
    off = std::clamp(off, -h, h);
    refined[ku] += off;
  }

  if (refined != result.mu_tilde) {
    try {
      const double refined_value = local_linear_fit_impl(data, refined, config).value;
      if (refined_value >= best_value) {
        result.mu_tilde = refined;
        result.mu_tilde_value = refined_value;
      }
    } catch (const RankError&) {
      // keep the grid argmax
    }
  }
  return result;
}

double span_to_bandwidth(double span_fraction, const Domain& domain) {
  domain.validate();
  if (!(span_fraction > 0.0 && span_fraction <= 1.0)) {
    throw ConfigError("span_to_bandwidth: span must be in (0,1]");
  }
  const int d = domain.dim();
  double log_edge = 0.0;
  for (int k = 0; k < d; ++k) log_edge += std::log(domain.edge(k));
  const double edge = std::exp(log_edge / d);
  return 0.5 * edge * std::pow(span_fraction, 1.0 / d);
}

void write_surface_csv(const Stage1Result& result, std::ostream& os) {
  if (result.surface.empty()) return;
  const auto d = result.surface.front().point.size();
  for (std::size_t k = 0; k < d; ++k) os << "x" << (k + 1) << ",";
  os << "fitted,n_eff\n";
  for (const auto& gv : result.surface) {
    for (std::size_t k = 0; k < d; ++k) os << csv::fmt(gv.point[k]) << ",";
    os << csv::fmt(gv.value) << "," << csv::fmt(gv.n_eff) << "\n";
  }
}

}  // namespace peakfit
