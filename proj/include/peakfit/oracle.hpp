#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "peakfit/design.hpp"

namespace peakfit {

// A registered truth with its reference domain and known optimum. Every
// builtin is checked at construction: the recorded maximizer must be
// interior and the finite-difference Hessian there negative definite.
struct TestFunction {
  std::string name;
  std::function<double(std::span<const double>)> eval;
  Domain domain;
  std::vector<double> true_mu;
  double true_M = 0.0;
  Eigen::MatrixXd hessian_at_mu;  // empty when not recorded

  int dim() const { return domain.dim(); }
};

// f(x,y) = 5 x(x-1) y(y-1) sin(11x) sin(11y) on [0,1]^2.
double sec5_value(std::span<const double> x);

TestFunction make_sec5();

// f(x) = max_value + (x-mu)^T H (x-mu) / 2 with H negative definite.
TestFunction make_quadratic(std::vector<double> mu, Eigen::MatrixXd neg_hessian,
                            double max_value, Domain domain);

// Isotropic bump f(x) = amplitude * exp(-||x-mu||^2 / (2 s^2)).
TestFunction make_gaussian_bump(std::vector<double> mu, double s, double amplitude,
                                Domain domain);

// Registry used by the CLI: "sec5" (d=2), "quad", "bump". For "quad" and
// "bump", dim selects the dimension (default 2).
TestFunction builtin_function(const std::string& name, int dim = 0);

std::vector<std::string> builtin_function_names();

// Noisy evaluation Y = f(x) + sigma * g with g standard normal from a
// counter-based stream keyed by (seed, samples_used). One instance per
// estimation run; instances are independent and never shared across threads.
class SamplingOracle {
 public:
  SamplingOracle(TestFunction truth, double sigma, std::uint64_t seed,
                 std::optional<std::int64_t> budget_cap = std::nullopt);

  double sample(std::span<const double> x);

  const TestFunction& truth() const { return truth_; }
  double sigma() const { return sigma_; }
  std::uint64_t seed() const { return seed_; }
  std::int64_t samples_used() const { return samples_used_; }
  std::optional<std::int64_t> budget_cap() const { return budget_cap_; }

 private:
  TestFunction truth_;
  double sigma_;
  std::uint64_t seed_;
  std::optional<std::int64_t> budget_cap_;
  std::int64_t samples_used_ = 0;
};

}  // namespace peakfit
