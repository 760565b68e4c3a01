#include "peakfit/oracle.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "peakfit/errors.hpp"
#include "peakfit/rng.hpp"

namespace peakfit {

namespace {

// Maximizer of the sec5 surface, computed offline by a dense scan plus
// high-precision Newton refinement and frozen here.
constexpr double kSec5MuCoord = 0.432912164071048597;
constexpr double kSec5Max = 0.300607242464518058;
constexpr double kSec5HessDiag = -39.0020107025090617;

Eigen::MatrixXd fd_hessian(const std::function<double(std::span<const double>)>& f,
                           std::span<const double> x, double h) {
  const int d = static_cast<int>(x.size());
  Eigen::MatrixXd hess(d, d);
  std::vector<double> p(x.begin(), x.end());
  const double f0 = f(p);
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      const auto iu = static_cast<std::size_t>(i);
      const auto ju = static_cast<std::size_t>(j);
      double v;
      if (i == j) {
        p[iu] += h;
        const double fp = f(p);
        p[iu] -= 2 * h;
        const double fm = f(p);
        p[iu] += h;
        v = (fp - 2 * f0 + fm) / (h * h);
      } else {
        p[iu] += h; p[ju] += h;
        const double fpp = f(p);
        p[ju] -= 2 * h;
        const double fpm = f(p);
        p[iu] -= 2 * h;
        const double fmm = f(p);
        p[ju] += 2 * h;
        const double fmp = f(p);
        p[iu] += h; p[ju] -= h;
        v = (fpp - fpm - fmp + fmm) / (4 * h * h);
      }
      hess(i, j) = v;
      hess(j, i) = v;
    }
  }
  return hess;
}

// Condition (A2): interior maximizer with a negative definite Hessian.
void check_registration(const TestFunction& f) {
  f.domain.validate();
  if (static_cast<int>(f.true_mu.size()) != f.dim()) {
    throw ConfigError("test function '" + f.name + "': maximizer dimension mismatch");
  }
  for (int k = 0; k < f.dim(); ++k) {
    const auto ku = static_cast<std::size_t>(k);
    if (!(f.true_mu[ku] > f.domain.lower[ku] && f.true_mu[ku] < f.domain.upper[ku])) {
      throw ConfigError("test function '" + f.name + "': maximizer not interior");
    }
  }
  double h = 1e-4;
  for (int k = 0; k < f.dim(); ++k) h = std::min(h, 1e-4 * f.domain.edge(k));
  const Eigen::MatrixXd hess = fd_hessian(f.eval, f.true_mu, h);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(hess);
  if (eig.info() != Eigen::Success || !(eig.eigenvalues().maxCoeff() < 0.0)) {
    throw ConfigError("test function '" + f.name +
                      "': Hessian at the maximizer is not negative definite");
  }
}

}  // namespace

double sec5_value(std::span<const double> x) {
  if (x.size() != 2) throw ConfigError("sec5: expects a bivariate point");
  if (x[0] < 0.0 || x[0] > 1.0 || x[1] < 0.0 || x[1] > 1.0) {
    throw ConfigError("sec5: point outside [0,1]^2");
  }
  return 5.0 * x[0] * (x[0] - 1.0) * x[1] * (x[1] - 1.0) *
         std::sin(11.0 * x[0]) * std::sin(11.0 * x[1]);
}

TestFunction make_sec5() {
  TestFunction f;
  f.name = "sec5";
  f.eval = sec5_value;
  f.domain = unit_cube(2);
  f.true_mu = {kSec5MuCoord, kSec5MuCoord};
  f.true_M = kSec5Max;
  f.hessian_at_mu = Eigen::MatrixXd::Zero(2, 2);
  f.hessian_at_mu(0, 0) = kSec5HessDiag;
  f.hessian_at_mu(1, 1) = kSec5HessDiag;
  check_registration(f);
  return f;
}

TestFunction make_quadratic(std::vector<double> mu, Eigen::MatrixXd neg_hessian,
                            double max_value, Domain domain) {
  const int d = domain.dim();
  if (static_cast<int>(mu.size()) != d ||
      neg_hessian.rows() != d || neg_hessian.cols() != d) {
    throw ConfigError("make_quadratic: dimension mismatch");
  }
  TestFunction f;
  f.name = "quad";
  f.domain = std::move(domain);
  f.true_mu = mu;
  f.true_M = max_value;
  f.hessian_at_mu = neg_hessian;
  f.eval = [mu = std::move(mu), h = std::move(neg_hessian), max_value,
            d](std::span<const double> x) {
    if (static_cast<int>(x.size()) != d) throw ConfigError("quad: dimension mismatch");
    Eigen::VectorXd z(d);
    for (int k = 0; k < d; ++k) {
      z(k) = x[static_cast<std::size_t>(k)] - mu[static_cast<std::size_t>(k)];
    }
    return max_value + 0.5 * z.dot(h * z);
  };
  check_registration(f);
  return f;
}

TestFunction make_gaussian_bump(std::vector<double> mu, double s, double amplitude,
                                Domain domain) {
  const int d = domain.dim();
  if (static_cast<int>(mu.size()) != d) throw ConfigError("make_gaussian_bump: dimension mismatch");
  if (!(s > 0.0) || !(amplitude > 0.0)) {
    throw ConfigError("make_gaussian_bump: scale and amplitude must be positive");
  }
  TestFunction f;
  f.name = "bump";
  f.domain = std::move(domain);
  f.true_mu = mu;
  f.true_M = amplitude;
  f.hessian_at_mu = (-amplitude / (s * s)) * Eigen::MatrixXd::Identity(d, d);
  f.eval = [mu = std::move(mu), s, amplitude, d](std::span<const double> x) {
    if (static_cast<int>(x.size()) != d) throw ConfigError("bump: dimension mismatch");
    double r2 = 0.0;
    for (int k = 0; k < d; ++k) {
      const double t = x[static_cast<std::size_t>(k)] - mu[static_cast<std::size_t>(k)];
      r2 += t * t;
    }
    return amplitude * std::exp(-0.5 * r2 / (s * s));
  };
  check_registration(f);
  return f;
}

TestFunction builtin_function(const std::string& name, int dim) {
  if (name == "sec5") {
    if (dim != 0 && dim != 2) throw ConfigError("sec5 is bivariate");
    return make_sec5();
  }
  const int d = dim == 0 ? 2 : dim;
  if (name == "quad") {
    std::vector<double> mu(static_cast<std::size_t>(d));
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(d, d);
    const double mus[3] = {0.3, 0.6, 0.45};
    const double curv[3] = {-8.0, -12.0, -10.0};
    for (int k = 0; k < d; ++k) {
      mu[static_cast<std::size_t>(k)] = mus[k % 3];
      h(k, k) = curv[k % 3];
    }
    return make_quadratic(std::move(mu), std::move(h), 1.0, unit_cube(d));
  }
  if (name == "bump") {
    std::vector<double> mu(static_cast<std::size_t>(d));
    const double mus[3] = {0.4, 0.55, 0.5};
    for (int k = 0; k < d; ++k) mu[static_cast<std::size_t>(k)] = mus[k % 3];
    return make_gaussian_bump(std::move(mu), 0.2, 1.0, unit_cube(d));
  }
  throw ConfigError("unknown test function: " + name);
}

std::vector<std::string> builtin_function_names() { return {"sec5", "quad", "bump"}; }

SamplingOracle::SamplingOracle(TestFunction truth, double sigma, std::uint64_t seed,
                               std::optional<std::int64_t> budget_cap)
    : truth_(std::move(truth)), sigma_(sigma), seed_(seed), budget_cap_(budget_cap) {
  if (!(sigma >= 0.0)) throw ConfigError("oracle: sigma must be >= 0");
}

double SamplingOracle::sample(std::span<const double> x) {
  if (budget_cap_ && samples_used_ >= *budget_cap_) {
    throw BudgetError("oracle: sampling budget exhausted");
  }
  const double noise =
      sigma_ > 0.0
          ? sigma_ * rng::normal(seed_, static_cast<std::uint64_t>(samples_used_))
          : 0.0;
  const double y = truth_.eval(x) + noise;
  ++samples_used_;
  return y;
}

}  // namespace peakfit
