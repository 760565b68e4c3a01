#include "peakfit/lsq.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>
#include <limits>
#include <ostream>

#include "peakfit/csv.hpp"
#include "peakfit/errors.hpp"

namespace peakfit {

namespace {

void require_stage2(const DesignPlan& plan) {
  if (plan.kind != PlanKind::kStage2 || plan.offsets.size() != plan.points.size()) {
    throw ConfigError("lsq: expected a stage-2 design plan");
  }
}

// Scaled design matrix B = Z Delta^{-1}; entries are the integer powers
// u^i of the grid offsets, so B is independent of delta and center.
Eigen::MatrixXd scaled_design_matrix(const DesignPlan& plan, const MultiIndexSet& set) {
  const auto q1 = static_cast<Eigen::Index>(set.size());
  const auto rows = static_cast<Eigen::Index>(plan.total);
  Eigen::MatrixXd b(rows, q1);
  Eigen::Index r = 0;
  for (std::size_t j = 0; j < plan.offsets.size(); ++j) {
    Eigen::RowVectorXd row(q1);
    for (Eigen::Index c = 0; c < q1; ++c) {
      row(c) = monomial_eval(std::span<const int>(plan.offsets[j]),
                             set[static_cast<std::size_t>(c)]);
    }
    for (std::int64_t t = 0; t < plan.replications[j]; ++t) b.row(r++) = row;
  }
  return b;
}

std::vector<double> delta_powers(const DesignPlan& plan, const MultiIndexSet& set) {
  std::vector<double> powers(set.size());
  for (std::size_t c = 0; c < set.size(); ++c) {
    powers[c] = int_pow(plan.delta, set[c].degree());
  }
  return powers;
}

}  // namespace

double FitResult::inverse_gram_entry(std::size_t i, std::size_t j) const {
  return inv_gram_scaled(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) /
         (scaling[i] * scaling[j]);
}

Eigen::MatrixXd build_design_matrix(const DesignPlan& plan, int r_alpha) {
  require_stage2(plan);
  const MultiIndexSet set(plan.dim(), r_alpha);
  Eigen::MatrixXd z = scaled_design_matrix(plan, set);
  const std::vector<double> powers = delta_powers(plan, set);
  for (std::size_t c = 0; c < powers.size(); ++c) {
    z.col(static_cast<Eigen::Index>(c)) *= powers[c];
  }
  return z;
}

FitResult fit_polynomial(const DesignPlan& plan, std::span<const double> responses,
                         int r_alpha) {
  require_stage2(plan);
  if (static_cast<std::int64_t>(responses.size()) != plan.total) {
    throw ConfigError("fit_polynomial: response length must equal the plan total");
  }
  if (2 * plan.level + 1 <= r_alpha) {
    throw ConfigError("fit_polynomial: needs 2l+1 > r_alpha distinct levels per axis");
  }

  const MultiIndexSet set(plan.dim(), r_alpha);
  const auto q1 = static_cast<Eigen::Index>(set.size());
  const Eigen::MatrixXd b = scaled_design_matrix(plan, set);
  const Eigen::Map<const Eigen::VectorXd> y(responses.data(),
                                            static_cast<Eigen::Index>(responses.size()));

  Eigen::HouseholderQR<Eigen::MatrixXd> qr(b);
  const Eigen::MatrixXd r_factor =
      qr.matrixQR().topLeftCorner(q1, q1).triangularView<Eigen::Upper>();
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(r_factor);
  const double smax = svd.singularValues()(0);
  const double smin = svd.singularValues()(q1 - 1);
  if (!(smin > 1e-12 * smax)) {
    throw RankError("fit_polynomial: scaled design matrix is numerically rank-deficient");
  }

  const Eigen::VectorXd w = qr.solve(y);
  const std::vector<double> powers = delta_powers(plan, set);
  std::vector<double> theta(set.size());
  for (std::size_t c = 0; c < set.size(); ++c) {
    theta[c] = w(static_cast<Eigen::Index>(c)) / powers[c];
  }

  FitResult out{PolynomialModel(set, std::move(theta)),
                plan.center,
                powers,
                smax / smin,
                (y - b * w).norm(),
                0.0,
                {},
                Eigen::MatrixXd()};

  const Eigen::MatrixXd r_inv =
      r_factor.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(q1, q1));
  out.inv_gram_scaled = r_inv * r_inv.transpose();

  const auto dof = static_cast<double>(plan.total) - static_cast<double>(set.size());
  out.sigma_hat = dof > 0 ? out.residual_norm / std::sqrt(dof)
                          : std::numeric_limits<double>::quiet_NaN();
  out.std_errors.resize(set.size());
  for (std::size_t c = 0; c < set.size(); ++c) {
    out.std_errors[c] = out.sigma_hat * std::sqrt(out.inverse_gram_entry(c, c));
  }
  return out;
}

std::pair<Eigen::MatrixXd, std::vector<double>> gram_structure(const DesignPlan& plan,
                                                               int r_alpha) {
  require_stage2(plan);
  const MultiIndexSet set(plan.dim(), r_alpha);
  const auto q1 = static_cast<Eigen::Index>(set.size());
  // a_{ij} = sum over the distinct integer offsets u of u^{i_i + i_j};
  // exact in double arithmetic for every level used here
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(q1, q1);
  for (Eigen::Index i = 0; i < q1; ++i) {
    for (Eigen::Index j = i; j < q1; ++j) {
      std::vector<int> combined(set[static_cast<std::size_t>(i)].entries());
      const MultiIndex& ij = set[static_cast<std::size_t>(j)];
      for (int k = 0; k < ij.dim(); ++k) combined[static_cast<std::size_t>(k)] += ij[k];
      const MultiIndex power{combined};
      double sum = 0.0;
      for (const auto& u : plan.offsets) {
        sum += monomial_eval(std::span<const int>(u), power);
      }
      a(i, j) = sum;
      a(j, i) = sum;
    }
  }
  return {a, delta_powers(plan, set)};
}

void write_fit_csv(const FitResult& fit, std::ostream& os) {
  os << "index,coefficient,std_error\n";
  const MultiIndexSet& set = fit.theta_hat.index_set();
  for (std::size_t c = 0; c < set.size(); ++c) {
    os << "\"";
    for (int k = 0; k < set[c].dim(); ++k) {
      if (k) os << " ";
      os << set[c][k];
    }
    os << "\"," << csv::fmt(fit.theta_hat.coefficients()[c]) << ","
       << csv::fmt(fit.std_errors[c]) << "\n";
  }
}

}  // namespace peakfit
