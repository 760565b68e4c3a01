#include "peakfit/design.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "peakfit/csv.hpp"
#include "peakfit/errors.hpp"

namespace peakfit {

bool Domain::contains(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim()) return false;
  for (int k = 0; k < dim(); ++k) {
    const auto ku = static_cast<std::size_t>(k);
    if (x[ku] < lower[ku] || x[ku] > upper[ku]) return false;
  }
  return true;
}

void Domain::validate() const {
  if (lower.empty() || lower.size() != upper.size()) {
    throw ConfigError("domain: lower/upper must be non-empty and same length");
  }
  for (int k = 0; k < dim(); ++k) {
    if (!(lower[static_cast<std::size_t>(k)] < upper[static_cast<std::size_t>(k)])) {
      throw ConfigError("domain: requires lower < upper componentwise");
    }
  }
}

Domain unit_cube(int dim) {
  return Domain{std::vector<double>(static_cast<std::size_t>(dim), 0.0),
                std::vector<double>(static_cast<std::size_t>(dim), 1.0)};
}

bool DesignPlan::translated() const {
  for (double s : applied_shift) {
    if (s != 0.0) return true;
  }
  return false;
}

BudgetSplit split_budget(std::int64_t n, double upsilon) {
  if (n < 2) throw ConfigError("budget split requires n >= 2");
  if (!(upsilon > 0.0 && upsilon < 1.0)) {
    throw ConfigError("budget split requires upsilon in (0,1)");
  }
  auto n1 = static_cast<std::int64_t>(std::llround(upsilon * static_cast<double>(n)));
  n1 = std::clamp<std::int64_t>(n1, 1, n - 1);
  return BudgetSplit{n, n1, n - n1, upsilon};
}

namespace {

// Largest m with m^d <= n1, found by integer search (safe against pow noise).
int lattice_side(std::int64_t n1, int d) {
  int m = std::max(1, static_cast<int>(std::floor(
                          std::pow(static_cast<double>(n1), 1.0 / d))));
  auto ipow = [d](std::int64_t base) {
    std::int64_t p = 1;
    for (int k = 0; k < d; ++k) p *= base;
    return p;
  };
  while (ipow(m + 1) <= n1) ++m;
  while (m > 1 && ipow(m) > n1) --m;
  return m;
}

}  // namespace

DesignPlan stage1_grid(const Domain& domain, std::int64_t n1) {
  domain.validate();
  const int d = domain.dim();
  if (n1 < (std::int64_t{1} << d)) {
    throw ConfigError("stage1_grid: n1 must be at least 2^d");
  }
  const int m = lattice_side(n1, d);
  std::int64_t npts = 1;
  for (int k = 0; k < d; ++k) npts *= m;

  DesignPlan plan;
  plan.kind = PlanKind::kStage1;
  plan.requested = n1;
  plan.total = npts;
  plan.unused = n1 - npts;
  plan.points.reserve(static_cast<std::size_t>(npts));
  plan.replications.assign(static_cast<std::size_t>(npts), 1);

  std::vector<int> digit(static_cast<std::size_t>(d), 0);
  while (true) {
    std::vector<double> x(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k) {
      const auto ku = static_cast<std::size_t>(k);
      x[ku] = domain.lower[ku] +
              domain.edge(k) * (2.0 * digit[ku] + 1.0) / (2.0 * m);
    }
    plan.points.push_back(std::move(x));
    int k = d - 1;
    while (k >= 0 && digit[static_cast<std::size_t>(k)] == m - 1) {
      digit[static_cast<std::size_t>(k)] = 0;
      --k;
    }
    if (k < 0) break;
    ++digit[static_cast<std::size_t>(k)];
  }
  return plan;
}

int stage2_zoom_level(int r_alpha) {
  if (r_alpha < 1) throw ConfigError("stage2_zoom_level requires r_alpha >= 1");
  return (r_alpha + 1) / 2;
}

DesignPlan stage2_design(std::span<const double> center, double delta, int l,
                         std::int64_t n2, const Domain& domain) {
  domain.validate();
  const int d = domain.dim();
  if (static_cast<int>(center.size()) != d) {
    throw ConfigError("stage2_design: center dimension mismatch");
  }
  if (!(delta > 0.0)) throw ConfigError("stage2_design: delta must be positive");
  if (l < 1) throw ConfigError("stage2_design: zoom level must be >= 1");

  std::int64_t npts = 1;
  for (int k = 0; k < d; ++k) npts *= (2 * l + 1);
  if (n2 < npts) {
    throw BudgetError("stage2_design: budget below one replication per grid point");
  }

  const double half = l * delta;
  std::vector<double> c(center.begin(), center.end());
  std::vector<double> shift(static_cast<std::size_t>(d), 0.0);
  for (int k = 0; k < d; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    if (2.0 * half > domain.edge(k)) {
      throw EstimationError("stage2_design: cube does not fit inside the domain");
    }
    double ck = c[ku];
    if (ck - half < domain.lower[ku]) ck = domain.lower[ku] + half;
    if (ck + half > domain.upper[ku]) ck = domain.upper[ku] - half;
    shift[ku] = ck - c[ku];
    c[ku] = ck;
  }

  DesignPlan plan;
  plan.kind = PlanKind::kStage2;
  plan.requested = n2;
  plan.center = c;
  plan.requested_center.assign(center.begin(), center.end());
  plan.applied_shift = shift;
  plan.delta = delta;
  plan.level = l;

  const std::int64_t n3 = n2 / npts;
  plan.total = n3 * npts;
  plan.unused = n2 - plan.total;
  plan.points.reserve(static_cast<std::size_t>(npts));
  plan.offsets.reserve(static_cast<std::size_t>(npts));
  plan.replications.assign(static_cast<std::size_t>(npts), n3);

  std::vector<int> off(static_cast<std::size_t>(d), -l);
  while (true) {
    std::vector<double> x(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k) {
      const auto ku = static_cast<std::size_t>(k);
      x[ku] = c[ku] + off[ku] * delta;
    }
    plan.points.push_back(std::move(x));
    plan.offsets.push_back(off);
    int k = d - 1;
    while (k >= 0 && off[static_cast<std::size_t>(k)] == l) {
      off[static_cast<std::size_t>(k)] = -l;
      --k;
    }
    if (k < 0) break;
    ++off[static_cast<std::size_t>(k)];
  }
  return plan;
}

void write_plan_csv(const DesignPlan& plan, std::ostream& os) {
  const int d = plan.dim();
  for (int k = 0; k < d; ++k) os << "x" << (k + 1) << ",";
  os << "replication\n";
  for (std::size_t j = 0; j < plan.points.size(); ++j) {
    for (int k = 0; k < d; ++k) {
      os << csv::fmt(plan.points[j][static_cast<std::size_t>(k)]) << ",";
    }
    os << plan.replications[j] << "\n";
  }
}

}  // namespace peakfit
