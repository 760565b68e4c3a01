#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "peakfit/design.hpp"

namespace peakfit {

struct Sample {
  std::vector<double> x;
  double y = 0.0;
};

enum class Kernel { kTricube, kGaussian };

struct SmootherConfig {
  double bandwidth = 0.1;      // kernel scale, in absolute domain units
  int eval_grid_per_dim = 25;  // >= 8
  Kernel kernel = Kernel::kTricube;
};

// Preliminary estimator: local linear surface on an evaluation grid,
// argmax, then one coordinatewise parabolic-vertex refinement.
struct Stage1Result {
  std::vector<double> mu_tilde;
  double mu_tilde_value = 0.0;  // smoother value at mu_tilde
  struct GridValue {
    std::vector<double> point;
    double value = 0.0;  // NaN where the local system was rank-deficient
    double n_eff = 0.0;  // effective sample count (sum w)^2 / sum w^2
  };
  std::vector<GridValue> surface;
  bool degenerate = false;  // total tie across the evaluation grid
};

// Intercept of the weighted least squares fit of y on (1, x - x0) with
// kernel weights K(||x - x0|| / h). Throws RankError when fewer than d+2
// points carry positive weight or the local system is rank-deficient,
// which signals a bandwidth that is too small.
double local_linear_fit(std::span<const Sample> data, std::span<const double> x0,
                        const SmootherConfig& config);

Stage1Result stage1_estimate(std::span<const Sample> data, const Domain& domain,
                             const SmootherConfig& config);

// Approximate loess-style span fraction -> absolute bandwidth, for
// near-uniform designs: half the edge scale times span^(1/d).
double span_to_bandwidth(double span_fraction, const Domain& domain);

void write_surface_csv(const Stage1Result& result, std::ostream& os);

}  // namespace peakfit
