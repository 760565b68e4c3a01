#include "peakfit/maximize.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>

#include "peakfit/errors.hpp"

namespace peakfit {

namespace {

struct Candidate {
  std::vector<double> x;
  double value = -std::numeric_limits<double>::infinity();
};

bool dict_less(const std::vector<double>& a, const std::vector<double>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

void clip_to_cube(std::vector<double>& x, double w) {
  for (double& c : x) c = std::clamp(c, -w, w);
}

// Damped Newton ascent with frozen-coordinate projection. Only improving
// steps are accepted, so the terminal value never falls below the seed's.
Candidate newton_from(const PolynomialModel& p, std::vector<double> x, double w,
                      const MaximizerConfig& cfg, int& iterations) {
  const int d = p.dim();
  double value = p.eval(x);
  for (int iter = 0; iter < cfg.max_newton_iters; ++iter) {
    const Eigen::VectorXd g = p.gradient(x);
    std::vector<int> free;
    free.reserve(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k) {
      const double xk = x[static_cast<std::size_t>(k)];
      const bool frozen = (xk == w && g(k) > 0.0) || (xk == -w && g(k) < 0.0);
      if (!frozen) free.push_back(k);
    }
    if (free.empty()) break;

    double gmax = 0.0;
    for (int k : free) gmax = std::max(gmax, std::abs(g(k)));
    if (gmax * w <= cfg.grad_tol * (1.0 + std::abs(value))) break;

    const auto nf = static_cast<Eigen::Index>(free.size());
    Eigen::VectorXd gf(nf);
    for (Eigen::Index t = 0; t < nf; ++t) gf(t) = g(free[static_cast<std::size_t>(t)]);
    const Eigen::MatrixXd h = p.hessian(x);
    Eigen::MatrixXd hf(nf, nf);
    for (Eigen::Index a = 0; a < nf; ++a) {
      for (Eigen::Index b = 0; b < nf; ++b) {
        hf(a, b) = h(free[static_cast<std::size_t>(a)], free[static_cast<std::size_t>(b)]);
      }
    }

    // Newton step toward the stationary point; fall back to gradient ascent
    // when the step is not an ascent direction.
    Eigen::VectorXd step = Eigen::FullPivLU<Eigen::MatrixXd>(hf).solve(-gf);
    const bool usable = step.allFinite() && step.dot(gf) > 0.0;
    if (!usable) {
      step = gf * (0.5 * w / std::max(gf.cwiseAbs().maxCoeff(),
                                      std::numeric_limits<double>::min()));
    }

    double t = 1.0;
    bool improved = false;
    std::vector<double> candidate(static_cast<std::size_t>(d));
    while (t > 1e-16) {
      candidate = x;
      for (Eigen::Index a = 0; a < nf; ++a) {
        candidate[static_cast<std::size_t>(free[static_cast<std::size_t>(a)])] += t * step(a);
      }
      clip_to_cube(candidate, w);
      const double cv = p.eval(candidate);
      if (!std::isfinite(cv)) {
        throw EstimationError("maximize_over_cube: non-finite polynomial value");
      }
      if (cv > value) {
        x = candidate;
        value = cv;
        improved = true;
        break;
      }
      t *= cfg.step_shrink;
    }
    ++iterations;
#ifndef NDEBUG
    for (double c : x) assert(std::abs(c) <= w);
#endif
    if (!improved) break;
  }
  return Candidate{std::move(x), value};
}

}  // namespace

MaxResult maximize_over_cube(const PolynomialModel& p, double half_width,
                             const MaximizerConfig& cfg) {
  if (!(half_width > 0.0)) throw ConfigError("maximize_over_cube: half_width must be positive");
  if (p.dim() > 6) throw ConfigError("maximize_over_cube: dimension capped at 6");
  if (cfg.seeds_per_dim < 5) throw ConfigError("maximizer: seeds_per_dim must be >= 5");
  if (cfg.max_newton_iters < 1 || !(cfg.step_shrink > 0.0 && cfg.step_shrink < 1.0) ||
      !(cfg.grad_tol > 0.0 && cfg.grad_tol < 1.0)) {
    throw ConfigError("maximizer: invalid configuration");
  }

  const int d = p.dim();
  const double w = half_width;
  const int s = cfg.seeds_per_dim;

  // lattice seeds over the closed cube, endpoints exact
  std::vector<Candidate> best_seeds;  // top 3, best first
  std::vector<int> digit(static_cast<std::size_t>(d), 0);
  Candidate best_lattice;
  best_lattice.x.assign(static_cast<std::size_t>(d), -w);
  while (true) {
    std::vector<double> x(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k) {
      const int t = digit[static_cast<std::size_t>(k)];
      x[static_cast<std::size_t>(k)] =
          (t == 0) ? -w : (t == s - 1 ? w : -w + 2.0 * w * t / (s - 1));
    }
    const double v = p.eval(x);
    if (!std::isfinite(v)) {
      throw EstimationError("maximize_over_cube: non-finite polynomial value");
    }
    const Candidate c{std::move(x), v};
    if (c.value > best_lattice.value) best_lattice = c;
    const auto pos = std::find_if(best_seeds.begin(), best_seeds.end(),
                                  [&](const Candidate& b) { return c.value > b.value; });
    best_seeds.insert(pos, c);
    if (best_seeds.size() > 3) best_seeds.pop_back();

    int k = d - 1;
    while (k >= 0 && digit[static_cast<std::size_t>(k)] == s - 1) {
      digit[static_cast<std::size_t>(k)] = 0;
      --k;
    }
    if (k < 0) break;
    ++digit[static_cast<std::size_t>(k)];
  }

  int iterations = 0;
  Candidate best = best_lattice;
  for (const Candidate& seed : best_seeds) {
    Candidate terminal = newton_from(p, seed.x, w, cfg, iterations);
    if (terminal.value > best.value + 1e-12) {
      best = std::move(terminal);
    } else if (std::abs(terminal.value - best.value) <= 1e-12 &&
               dict_less(terminal.x, best.x)) {
      best = std::move(terminal);
    }
  }

  MaxResult result;
  result.value = best.value;
  result.argmax = std::move(best.x);
  result.iterations = iterations;
  result.on_boundary = false;
  for (double c : result.argmax) {
    if (c == w || c == -w) result.on_boundary = true;
  }
  return result;
}

bool certify_interior_max(const MaxResult& result, const PolynomialModel& p) {
  if (result.on_boundary) return false;
  const Eigen::VectorXd g = p.gradient(result.argmax);
  if (!(g.norm() <= 1e-8 * (1.0 + std::abs(result.value)))) return false;
  const Eigen::MatrixXd h = p.hessian(result.argmax);
  if (h.rows() == 0) return false;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h);
  return eig.info() == Eigen::Success && eig.eigenvalues().maxCoeff() < 0.0;
}

}  // namespace peakfit
