#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "peakfit/design.hpp"
#include "peakfit/polynomial.hpp"

namespace peakfit {

// Second-stage polynomial least squares in shifted coordinates z = x - center.
//
// The solve runs on the column-scaled matrix B = Z Delta^{-1}, whose entries
// are integer powers of the grid offsets: the same minimizer as the normal
// equations, without squaring the condition number, and exactly invariant
// in delta. The inverse Gram of Z is recovered from the factorization as
// (Z^T Z)^{-1} = Delta^{-1} (B^T B)^{-1} Delta^{-1}.
struct FitResult {
  PolynomialModel theta_hat;       // model in z-coordinates, canonical index order
  std::vector<double> center;      // shift applied to the raw design points
  std::vector<double> scaling;     // delta^{|i|} per index
  double condition_estimate = 0.0; // of the scaled design matrix, >= 1
  double residual_norm = 0.0;      // ||Y - Z theta_hat||
  double sigma_hat = 0.0;          // sqrt(RSS / (n2 - q - 1)); NaN when dof = 0
  std::vector<double> std_errors;  // sigma_hat * sqrt(diag (Z^T Z)^{-1})
  Eigen::MatrixXd inv_gram_scaled; // (B^T B)^{-1}

  // h_{ij}: the (i,j) entry of (Z^T Z)^{-1}.
  double inverse_gram_entry(std::size_t i, std::size_t j) const;
};

// Row k is the monomial vector of z_k = x_k - center; replicated points
// yield replicated rows; columns follow the canonical index order.
Eigen::MatrixXd build_design_matrix(const DesignPlan& plan, int r_alpha);

FitResult fit_polynomial(const DesignPlan& plan, std::span<const double> responses,
                         int r_alpha);

// The dimensionless factor A and the powers delta^{|i_j|} of the Gram
// decomposition Z^T Z = n3 * Delta A Delta. A depends only on (l, d, r_alpha).
std::pair<Eigen::MatrixXd, std::vector<double>> gram_structure(const DesignPlan& plan,
                                                               int r_alpha);

// One row per coefficient: index tuple, coefficient, standard error.
void write_fit_csv(const FitResult& fit, std::ostream& os);

}  // namespace peakfit
