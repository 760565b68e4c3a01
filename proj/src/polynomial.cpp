#include "peakfit/polynomial.hpp"

#include <cmath>

#include "peakfit/errors.hpp"

namespace peakfit {

namespace {

void check_dim(int expected, std::size_t got, const char* what) {
  if (static_cast<std::size_t>(expected) != got) {
    throw ConfigError(std::string(what) + ": point dimension mismatch");
  }
}

// i_k (i_k - 1) ... (i_k - m_k + 1); zero when m_k > i_k.
double falling_factorial(int i, int m) {
  if (m > i) return 0.0;
  double f = 1.0;
  for (int t = 0; t < m; ++t) f *= static_cast<double>(i - t);
  return f;
}

}  // namespace

PolynomialModel::PolynomialModel(MultiIndexSet index_set,
                                 std::vector<double> coefficients)
    : index_set_(std::move(index_set)), coefficients_(std::move(coefficients)) {
  if (coefficients_.size() != index_set_.size()) {
    throw ConfigError("polynomial: coefficient count must equal index set size");
  }
  for (double c : coefficients_) {
    if (!std::isfinite(c)) throw ConfigError("polynomial: non-finite coefficient");
  }
}

double PolynomialModel::eval(std::span<const double> x) const {
  check_dim(dim(), x.size(), "poly eval");
  double sum = 0.0;
  for (std::size_t pos = 0; pos < index_set_.size(); ++pos) {
    sum += coefficients_[pos] * monomial_eval(x, index_set_[pos]);
  }
  return sum;
}

Eigen::VectorXd PolynomialModel::gradient(std::span<const double> x) const {
  check_dim(dim(), x.size(), "poly gradient");
  const int d = dim();
  Eigen::VectorXd g = Eigen::VectorXd::Zero(d);
  for (std::size_t pos = 0; pos < index_set_.size(); ++pos) {
    const MultiIndex& i = index_set_[pos];
    const double theta = coefficients_[pos];
    if (theta == 0.0) continue;
    for (int j = 0; j < d; ++j) {
      if (i[j] < 1) continue;
      double prod = theta * i[j];
      for (int k = 0; k < d; ++k) {
        prod *= int_pow(x[static_cast<std::size_t>(k)], k == j ? i[k] - 1 : i[k]);
      }
      g(j) += prod;
    }
  }
  return g;
}

Eigen::MatrixXd PolynomialModel::hessian(std::span<const double> x) const {
  check_dim(dim(), x.size(), "poly hessian");
  const int d = dim();
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(d, d);
  for (std::size_t pos = 0; pos < index_set_.size(); ++pos) {
    const MultiIndex& i = index_set_[pos];
    const double theta = coefficients_[pos];
    if (theta == 0.0 || i.degree() < 2) continue;
    for (int j = 0; j < d; ++j) {
      for (int k = j; k < d; ++k) {
        const double factor =
            (j == k) ? static_cast<double>(i[j]) * (i[j] - 1)
                     : static_cast<double>(i[j]) * i[k];
        if (factor == 0.0) continue;
        double prod = theta * factor;
        for (int m = 0; m < d; ++m) {
          int e = i[m];
          if (m == j) --e;
          if (m == k) --e;
          prod *= int_pow(x[static_cast<std::size_t>(m)], e);
        }
        h(j, k) += prod;
      }
    }
  }
  for (int j = 0; j < d; ++j) {
    for (int k = 0; k < j; ++k) h(j, k) = h(k, j);
  }
  return h;
}

double PolynomialModel::mixed_derivative(std::span<const double> x,
                                         const MultiIndex& m) const {
  check_dim(dim(), x.size(), "poly mixed derivative");
  if (m.dim() != dim()) {
    throw ConfigError("poly mixed derivative: index dimension mismatch");
  }
  double sum = 0.0;
  for (std::size_t pos = 0; pos < index_set_.size(); ++pos) {
    const MultiIndex& i = index_set_[pos];
    const double theta = coefficients_[pos];
    if (theta == 0.0) continue;
    double prod = theta;
    for (int k = 0; k < dim() && prod != 0.0; ++k) {
      prod *= falling_factorial(i[k], m[k]);
      if (prod != 0.0) prod *= int_pow(x[static_cast<std::size_t>(k)], i[k] - m[k]);
    }
    sum += prod;
  }
  return sum;
}

PolynomialModel PolynomialModel::shift(std::span<const double> c) const {
  check_dim(dim(), c.size(), "poly shift");
  const int d = dim();
  std::vector<double> shifted(index_set_.size(), 0.0);
  std::vector<int> sub(static_cast<std::size_t>(d), 0);
  for (std::size_t pos = 0; pos < index_set_.size(); ++pos) {
    const MultiIndex& i = index_set_[pos];
    const double theta = coefficients_[pos];
    if (theta == 0.0) continue;
    // theta (x - c)^i contributes to every j <= i componentwise.
    std::fill(sub.begin(), sub.end(), 0);
    while (true) {
      double coef = theta;
      for (int k = 0; k < d; ++k) {
        coef *= static_cast<double>(binomial(i[k], sub[static_cast<std::size_t>(k)]));
        coef *= int_pow(-c[static_cast<std::size_t>(k)],
                        i[k] - sub[static_cast<std::size_t>(k)]);
      }
      const auto target = index_set_.position_of(MultiIndex(sub));
      shifted[*target] += coef;
      // odometer over {0..i_1} x ... x {0..i_d}
      int k = d - 1;
      while (k >= 0 && sub[static_cast<std::size_t>(k)] == i[k]) {
        sub[static_cast<std::size_t>(k)] = 0;
        --k;
      }
      if (k < 0) break;
      ++sub[static_cast<std::size_t>(k)];
    }
  }
  return PolynomialModel(index_set_, std::move(shifted));
}

}  // namespace peakfit
