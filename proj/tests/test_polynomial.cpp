#include <cmath>
#include <functional>
#include <limits>
#include <random>

#include "doctest.h"
#include "peakfit/errors.hpp"
#include "peakfit/polynomial.hpp"

using namespace peakfit;

namespace {

// finite-difference oracles, built on eval() only

double fd_partial(const PolynomialModel& p, std::vector<double> x, int j, double h) {
  x[static_cast<std::size_t>(j)] += h;
  const double fp = p.eval(x);
  x[static_cast<std::size_t>(j)] -= 2 * h;
  const double fm = p.eval(x);
  return (fp - fm) / (2 * h);
}

double fd_second(const PolynomialModel& p, std::vector<double> x, int j, int k, double h) {
  if (j == k) {
    const double f0 = p.eval(x);
    x[static_cast<std::size_t>(j)] += h;
    const double fp = p.eval(x);
    x[static_cast<std::size_t>(j)] -= 2 * h;
    const double fm = p.eval(x);
    return (fp - 2 * f0 + fm) / (h * h);
  }
  auto at = [&](double dj, double dk) {
    auto y = x;
    y[static_cast<std::size_t>(j)] += dj;
    y[static_cast<std::size_t>(k)] += dk;
    return p.eval(y);
  };
  return (at(h, h) - at(h, -h) - at(-h, h) + at(-h, -h)) / (4 * h * h);
}

// nested central differences for D^i, one coordinate at a time
double fd_mixed(const std::function<double(std::vector<double>)>& f,
                std::vector<double> x, std::vector<int> remaining, double h) {
  int j = -1;
  for (std::size_t k = 0; k < remaining.size(); ++k) {
    if (remaining[k] > 0) {
      j = static_cast<int>(k);
      break;
    }
  }
  if (j < 0) return f(x);
  --remaining[static_cast<std::size_t>(j)];
  auto xp = x, xm = x;
  xp[static_cast<std::size_t>(j)] += h;
  xm[static_cast<std::size_t>(j)] -= h;
  return (fd_mixed(f, xp, remaining, h) - fd_mixed(f, xm, remaining, h)) / (2 * h);
}

PolynomialModel random_poly(int d, int degree, std::mt19937_64& gen) {
  const MultiIndexSet set(d, degree);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::vector<double> theta(set.size());
  for (std::size_t i = 0; i < set.size(); ++i) {
    theta[i] = coef(gen) / (1.0 + set[i].degree() * set[i].degree());
  }
  return PolynomialModel(set, std::move(theta));
}

std::vector<double> random_point(int d, std::mt19937_64& gen, double half = 1.0) {
  std::uniform_real_distribution<double> coord(-half, half);
  std::vector<double> x(static_cast<std::size_t>(d));
  for (auto& c : x) c = coord(gen);
  return x;
}

bool close_rel(double a, double b, double tol) {
  return std::abs(a - b) <= tol * (1.0 + std::max(std::abs(a), std::abs(b)));
}

}  // namespace

TEST_CASE("constant and quadratic evaluation") {
  const PolynomialModel c(MultiIndexSet(2, 0), {3.5});
  CHECK(c.eval(std::vector<double>{0.1, -0.7}) == 3.5);

  // x1^2 + x2^2 over I(2,2): order (0,0),(0,1),(1,0),(0,2),(1,1),(2,0)
  const PolynomialModel sphere(MultiIndexSet(2, 2), {0, 0, 0, 1, 0, 1});
  CHECK(sphere.eval(std::vector<double>{3, 4}) == doctest::Approx(25.0));
}

TEST_CASE("taylor coefficients of a quadratic reproduce it at the expansion point") {
  // f(x) = 2 - (x1-0.2)^2 - 2(x2+0.1)^2 expanded about 0:
  // f(0) + grad(0).x + 1/2 x^T H x
  auto f = [](double x1, double x2) {
    return 2.0 - (x1 - 0.2) * (x1 - 0.2) - 2.0 * (x2 + 0.1) * (x2 + 0.1);
  };
  const double f0 = f(0, 0);
  const double g1 = 0.4, g2 = -0.4;  // analytic gradient at 0
  const PolynomialModel taylor(MultiIndexSet(2, 2), {f0, g2, g1, -2.0, 0.0, -1.0});
  CHECK(taylor.eval(std::vector<double>{0.0, 0.0}) == doctest::Approx(f0));
  CHECK(taylor.eval(std::vector<double>{0.3, -0.2}) == doctest::Approx(f(0.3, -0.2)));
}

TEST_CASE("gradient analytic vs examples") {
  const PolynomialModel c(MultiIndexSet(2, 0), {1.0});
  CHECK(c.gradient(std::vector<double>{0.4, 0.4}).norm() == 0.0);

  const PolynomialModel neg_sphere(MultiIndexSet(2, 2), {0, 0, 0, -1, 0, -1});
  const Eigen::VectorXd g = neg_sphere.gradient(std::vector<double>{0.1, -0.2});
  CHECK(g(0) == doctest::Approx(-0.2).epsilon(1e-12));
  CHECK(g(1) == doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("gradient matches central finite differences") {
  std::mt19937_64 gen(11);
  for (int rep = 0; rep < 20; ++rep) {
    const int d = 1 + rep % 3;
    const PolynomialModel p = random_poly(d, 4, gen);
    const auto x = random_point(d, gen);
    const Eigen::VectorXd g = p.gradient(x);
    for (int j = 0; j < d; ++j) {
      CHECK(close_rel(g(j), fd_partial(p, x, j, 1e-5), 1e-6));
    }
  }
}

TEST_CASE("hessian examples, symmetry, finite differences") {
  const PolynomialModel neg_sphere(MultiIndexSet(2, 2), {0, 0, 0, -1, 0, -1});
  const Eigen::MatrixXd h = neg_sphere.hessian(std::vector<double>{0.3, 0.9});
  CHECK(h(0, 0) == doctest::Approx(-2.0));
  CHECK(h(1, 1) == doctest::Approx(-2.0));
  CHECK(h(0, 1) == 0.0);

  const PolynomialModel linear(MultiIndexSet(3, 1), {1.0, 0.5, -0.25, 2.0});
  CHECK(linear.hessian(std::vector<double>{0.1, 0.2, 0.3}).norm() == 0.0);

  std::mt19937_64 gen(12);
  for (int rep = 0; rep < 15; ++rep) {
    const int d = 1 + rep % 3;
    const PolynomialModel p = random_poly(d, 4, gen);
    const auto x = random_point(d, gen);
    const Eigen::MatrixXd hess = p.hessian(x);
    for (int j = 0; j < d; ++j) {
      for (int k = 0; k < d; ++k) {
        CHECK(hess(j, k) == hess(k, j));  // exact symmetry
        CHECK(close_rel(hess(j, k), fd_second(p, x, j, k, 1e-4), 1e-5));
      }
    }
  }
}

TEST_CASE("mixed derivatives") {
  std::mt19937_64 gen(13);
  const PolynomialModel p0 = random_poly(2, 3, gen);
  const auto x0 = random_point(2, gen);
  CHECK(p0.mixed_derivative(x0, MultiIndex::zero(2)) == doctest::Approx(p0.eval(x0)));

  // d^3/dx1^2 dx2 of x1^2 x2 is 2 everywhere
  const MultiIndexSet set(2, 3);
  std::vector<double> theta(set.size(), 0.0);
  theta[*set.position_of(MultiIndex({2, 1}))] = 1.0;
  const PolynomialModel m(set, theta);
  CHECK(m.mixed_derivative(std::vector<double>{0.7, -0.4}, MultiIndex({2, 1})) ==
        doctest::Approx(2.0));

  // degree above max_degree: identically zero derivative
  CHECK(m.mixed_derivative(std::vector<double>{0.7, -0.4}, MultiIndex({3, 1})) == 0.0);

  for (int rep = 0; rep < 15; ++rep) {
    const int d = 1 + rep % 3;
    const PolynomialModel p = random_poly(d, 4, gen);
    const auto x = random_point(d, gen, 0.5);
    std::uniform_int_distribution<int> deg(1, 3);
    std::uniform_int_distribution<int> which(0, d - 1);
    std::vector<int> entries(static_cast<std::size_t>(d), 0);
    const int total = deg(gen);
    for (int t = 0; t < total; ++t) ++entries[static_cast<std::size_t>(which(gen))];
    const MultiIndex i(entries);
    auto f = [&](std::vector<double> y) { return p.eval(y); };
    const double oracle = fd_mixed(f, x, entries, 1e-3);
    CHECK(close_rel(p.mixed_derivative(x, i), oracle, 1e-4));
  }
}

TEST_CASE("shift by binomial re-expansion") {
  // zero shift leaves coefficients untouched
  std::mt19937_64 gen(14);
  const PolynomialModel p = random_poly(2, 3, gen);
  const PolynomialModel same = p.shift(std::vector<double>{0.0, 0.0});
  for (std::size_t i = 0; i < p.coefficients().size(); ++i) {
    CHECK(same.coefficients()[i] == p.coefficients()[i]);
  }

  // x^2 shifted by c=1 -> (x-1)^2 = x^2 - 2x + 1
  const PolynomialModel sq(MultiIndexSet(1, 2), {0.0, 0.0, 1.0});
  const PolynomialModel shifted = sq.shift(std::vector<double>{1.0});
  CHECK(shifted.coefficients()[0] == doctest::Approx(1.0));
  CHECK(shifted.coefficients()[1] == doctest::Approx(-2.0));
  CHECK(shifted.coefficients()[2] == doctest::Approx(1.0));

  // pointwise identity q(x) = p(x - c) at random points
  for (int rep = 0; rep < 10; ++rep) {
    const int d = 1 + rep % 3;
    const PolynomialModel q = random_poly(d, 3, gen);
    const auto c = random_point(d, gen, 0.5);
    const PolynomialModel qs = q.shift(c);
    for (int t = 0; t < 100; ++t) {
      const auto x = random_point(d, gen);
      std::vector<double> xc(x);
      for (int k = 0; k < d; ++k) xc[static_cast<std::size_t>(k)] -= c[static_cast<std::size_t>(k)];
      CHECK(qs.eval(x) == doctest::Approx(q.eval(xc)).epsilon(1e-10));
    }
    // round-trip shift by c then -c
    std::vector<double> neg_c(c);
    for (auto& v : neg_c) v = -v;
    const PolynomialModel back = qs.shift(neg_c);
    for (std::size_t i = 0; i < q.coefficients().size(); ++i) {
      CHECK(back.coefficients()[i] == doctest::Approx(q.coefficients()[i]).epsilon(1e-10));
    }
  }
}

TEST_CASE("construction errors") {
  CHECK_THROWS_AS(PolynomialModel(MultiIndexSet(2, 1), {1.0}), ConfigError);
  CHECK_THROWS_AS(
      PolynomialModel(MultiIndexSet(1, 1), {1.0, std::numeric_limits<double>::infinity()}),
      ConfigError);
  const PolynomialModel p(MultiIndexSet(2, 1), {1.0, 2.0, 3.0});
  CHECK_THROWS_AS(p.eval(std::vector<double>{1.0}), ConfigError);
  CHECK_THROWS_AS(p.gradient(std::vector<double>{1.0, 2.0, 3.0}), ConfigError);
}
