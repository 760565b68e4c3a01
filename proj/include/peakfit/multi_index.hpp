#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace peakfit {

// Exponent tuple i = (i_1,...,i_d) of the d-variate monomial x^i.
class MultiIndex {
 public:
  explicit MultiIndex(std::vector<int> entries);
  static MultiIndex zero(int dim);

  int dim() const { return static_cast<int>(entries_.size()); }
  int degree() const { return degree_; }
  int operator[](int k) const { return entries_[static_cast<std::size_t>(k)]; }
  const std::vector<int>& entries() const { return entries_; }

  bool operator==(const MultiIndex& other) const {
    return entries_ == other.entries_;
  }

 private:
  std::vector<int> entries_;
  int degree_ = 0;
};

// Canonical order: by total degree, then dictionary order on the raw tuple
// compared left to right. Coefficient layouts everywhere depend on it.
bool canonical_less(const MultiIndex& a, const MultiIndex& b);

// All multi-indices with degree <= max_degree, stacked degree block by
// degree block, each block sorted in dictionary order. The first element is
// always the all-zero index.
class MultiIndexSet {
 public:
  MultiIndexSet(int dimension, int max_degree);

  int dimension() const { return dimension_; }
  int max_degree() const { return max_degree_; }
  std::size_t size() const { return indices_.size(); }
  const MultiIndex& operator[](std::size_t pos) const { return indices_[pos]; }
  const std::vector<MultiIndex>& indices() const { return indices_; }

  // Position in canonical order, or nullopt when the index is not a member.
  std::optional<std::size_t> position_of(const MultiIndex& i) const;

 private:
  int dimension_;
  int max_degree_;
  std::vector<MultiIndex> indices_;
};

// Largest integer strictly below alpha; the degree of the fitted polynomial
// for smoothness level alpha. For integer alpha this is alpha - 1.
int holder_order(double alpha);

// |I(r,d)| = sum_{k=0}^{r} C(d+k-1, d-1).
std::int64_t index_set_size(int r, int d);

std::int64_t binomial(int n, int k);

// x^i with the 0^0 = 1 convention, so the zero index is the intercept.
double monomial_eval(std::span<const double> x, const MultiIndex& i);
double monomial_eval(std::span<const int> x, const MultiIndex& i);

// x^e for a single coordinate, 0^0 = 1.
double int_pow(double x, int e);

}  // namespace peakfit
