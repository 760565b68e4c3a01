#include "peakfit/multi_index.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "peakfit/errors.hpp"

namespace peakfit {

MultiIndex::MultiIndex(std::vector<int> entries) : entries_(std::move(entries)) {
  if (entries_.empty()) throw ConfigError("multi-index must have dimension >= 1");
  for (int e : entries_) {
    if (e < 0) throw ConfigError("multi-index entries must be non-negative");
  }
  degree_ = std::accumulate(entries_.begin(), entries_.end(), 0);
}

MultiIndex MultiIndex::zero(int dim) {
  return MultiIndex(std::vector<int>(static_cast<std::size_t>(dim), 0));
}

bool canonical_less(const MultiIndex& a, const MultiIndex& b) {
  if (a.degree() != b.degree()) return a.degree() < b.degree();
  return std::lexicographical_compare(a.entries().begin(), a.entries().end(),
                                      b.entries().begin(), b.entries().end());
}

namespace {

// Appends, in dictionary order, every d-tuple of non-negative integers
// summing to exactly `degree`.
void emit_degree_block(int dim, int degree, std::vector<int>& prefix,
                       std::vector<MultiIndex>& out) {
  if (dim == 1) {
    prefix.push_back(degree);
    out.emplace_back(prefix);
    prefix.pop_back();
    return;
  }
  for (int v = 0; v <= degree; ++v) {
    prefix.push_back(v);
    emit_degree_block(dim - 1, degree - v, prefix, out);
    prefix.pop_back();
  }
}

}  // namespace

MultiIndexSet::MultiIndexSet(int dimension, int max_degree)
    : dimension_(dimension), max_degree_(max_degree) {
  if (dimension < 1) throw ConfigError("index set dimension must be >= 1");
  if (max_degree < 0) throw ConfigError("index set max_degree must be >= 0");
  indices_.reserve(static_cast<std::size_t>(index_set_size(max_degree, dimension)));
  std::vector<int> prefix;
  for (int k = 0; k <= max_degree; ++k) {
    emit_degree_block(dimension, k, prefix, indices_);
  }
}

std::optional<std::size_t> MultiIndexSet::position_of(const MultiIndex& i) const {
  if (i.dim() != dimension_) return std::nullopt;
  const auto it = std::lower_bound(indices_.begin(), indices_.end(), i, canonical_less);
  if (it == indices_.end() || !(*it == i)) return std::nullopt;
  return static_cast<std::size_t>(it - indices_.begin());
}

int holder_order(double alpha) {
  if (!(alpha > 0.0)) throw ConfigError("holder_order requires alpha > 0");
  int r = static_cast<int>(std::ceil(alpha)) - 1;
  // guard the integer boundary against rounding in ceil
  while (r >= alpha) --r;
  while (r + 1 < alpha) ++r;
  return r;
}

std::int64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::int64_t result = 1;
  for (int j = 1; j <= k; ++j) {
    result = result * (n - k + j) / j;
  }
  return result;
}

std::int64_t index_set_size(int r, int d) {
  if (r < 0 || d < 1) throw ConfigError("index_set_size requires r >= 0, d >= 1");
  std::int64_t total = 0;
  for (int k = 0; k <= r; ++k) {
    total += binomial(d + k - 1, d - 1);
  }
  return total;
}

double int_pow(double x, int e) {
  double result = 1.0;
  for (int j = 0; j < e; ++j) result *= x;
  return result;
}

double monomial_eval(std::span<const double> x, const MultiIndex& i) {
  if (static_cast<int>(x.size()) != i.dim()) {
    throw ConfigError("monomial_eval: point and index dimensions differ");
  }
  double prod = 1.0;
  for (int k = 0; k < i.dim(); ++k) prod *= int_pow(x[static_cast<std::size_t>(k)], i[k]);
  return prod;
}

double monomial_eval(std::span<const int> x, const MultiIndex& i) {
  if (static_cast<int>(x.size()) != i.dim()) {
    throw ConfigError("monomial_eval: point and index dimensions differ");
  }
  double prod = 1.0;
  for (int k = 0; k < i.dim(); ++k) {
    prod *= int_pow(static_cast<double>(x[static_cast<std::size_t>(k)]), i[k]);
  }
  return prod;
}

}  // namespace peakfit
