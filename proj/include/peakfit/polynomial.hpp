#pragma once

#include <Eigen/Core>
#include <span>
#include <vector>

#include "peakfit/multi_index.hpp"

namespace peakfit {

// Dense polynomial f(x) = sum_i theta_i x^i over a MultiIndexSet.
// Derivatives are analytic; finite differences exist only as test oracles.
// Immutable after construction, so concurrent reads are safe.
class PolynomialModel {
 public:
  PolynomialModel(MultiIndexSet index_set, std::vector<double> coefficients);

  const MultiIndexSet& index_set() const { return index_set_; }
  const std::vector<double>& coefficients() const { return coefficients_; }
  int dim() const { return index_set_.dimension(); }

  double eval(std::span<const double> x) const;

  // j-th entry: sum over i with i_j >= 1 of i_j theta_i x^{i - e_j}.
  Eigen::VectorXd gradient(std::span<const double> x) const;

  // Symmetric by construction: the (j,k) and (k,j) entries are the same value.
  Eigen::MatrixXd hessian(std::span<const double> x) const;

  // D^i f(x) via the falling-factorial rule; zero when any i_k exceeds the
  // corresponding exponent everywhere (in particular when |i| > max_degree).
  double mixed_derivative(std::span<const double> x, const MultiIndex& i) const;

  // q with q(x) = f(x - c), by binomial re-expansion over the same index set.
  PolynomialModel shift(std::span<const double> c) const;

 private:
  MultiIndexSet index_set_;
  std::vector<double> coefficients_;
};

}  // namespace peakfit
