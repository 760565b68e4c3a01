#pragma once

#include <vector>

#include "peakfit/polynomial.hpp"

namespace peakfit {

struct MaximizerConfig {
  int seeds_per_dim = 9;      // >= 5
  int max_newton_iters = 50;
  double grad_tol = 1e-12;    // on the gradient scaled by the cube half-width
  double step_shrink = 0.5;   // in (0,1)
};

struct MaxResult {
  std::vector<double> argmax;
  double value = 0.0;
  bool on_boundary = false;
  int iterations = 0;
};

// Box-constrained maximization of p over the cube [-half_width, half_width]^d:
// lattice seeding, then damped Newton from the best three seeds with
// boundary coordinates frozen whenever the gradient pushes outward. The
// returned value dominates every lattice seed by construction. Ties within
// 1e-12 in value break by dictionary order on the coordinates.
MaxResult maximize_over_cube(const PolynomialModel& p, double half_width,
                             const MaximizerConfig& config = {});

// True when the maximum is interior, the gradient vanishes to within
// 1e-8 * (1 + |value|), and the Hessian at the argmax is negative definite.
bool certify_interior_max(const MaxResult& result, const PolynomialModel& p);

}  // namespace peakfit
