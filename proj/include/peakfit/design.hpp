#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace peakfit {

// Axis-aligned hyper-rectangle. Restricting search domains to boxes keeps
// the lattice covering/separation bookkeeping exact.
struct Domain {
  std::vector<double> lower;
  std::vector<double> upper;

  int dim() const { return static_cast<int>(lower.size()); }
  double edge(int k) const {
    return upper[static_cast<std::size_t>(k)] - lower[static_cast<std::size_t>(k)];
  }
  bool contains(std::span<const double> x) const;
  void validate() const;
};

Domain unit_cube(int dim);

enum class PlanKind { kStage1, kStage2 };

// A set of distinct design points with replication counts and a budget
// ledger. Stage-2 plans additionally carry the symmetric-grid structure
// (center, spacing, zoom level, and the integer grid offsets).
struct DesignPlan {
  PlanKind kind = PlanKind::kStage1;
  std::vector<std::vector<double>> points;
  std::vector<std::int64_t> replications;
  std::int64_t total = 0;      // sum of replications (budget actually used)
  std::int64_t requested = 0;  // budget handed to the constructor
  std::int64_t unused = 0;     // requested - total, discarded and reported

  // stage-2 structure
  std::vector<double> center;            // actual center, after any translation
  std::vector<double> requested_center;  // center as requested by the caller
  std::vector<double> applied_shift;     // center - requested_center
  double delta = 0.0;                    // grid spacing delta_n
  int level = 0;                         // l: offsets run over {-l,...,l}^d
  std::vector<std::vector<int>> offsets; // dictionary order, aligned with points

  int dim() const { return points.empty() ? 0 : static_cast<int>(points.front().size()); }
  bool translated() const;
};

struct BudgetSplit {
  std::int64_t n = 0;
  std::int64_t n1 = 0;
  std::int64_t n2 = 0;
  double upsilon = 0.0;
};

// n1 = round(upsilon * n) clamped to [1, n-1]; n2 gets the rest.
BudgetSplit split_budget(std::int64_t n, double upsilon);

// m^d lattice at cell centers of a uniform partition, m = largest integer
// with m^d <= n1. Leftover budget is reported unused.
DesignPlan stage1_grid(const Domain& domain, std::int64_t n1);

// Smallest l with 2l >= r_alpha.
int stage2_zoom_level(int r_alpha);

// Symmetric replicated grid: points prod_k {c_k + j delta : j = 0,...,+-l},
// each replicated n3 = floor(n2 / (2l+1)^d) times. If the cube
// C(center, l*delta) exits the domain, the center is translated by the
// minimal componentwise shift that makes it fit, and the shift is recorded.
DesignPlan stage2_design(std::span<const double> center, double delta, int l,
                         std::int64_t n2, const Domain& domain);

// One row per distinct point: coordinates then replication count.
void write_plan_csv(const DesignPlan& plan, std::ostream& os);

}  // namespace peakfit
