#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "peakfit/errors.hpp"
#include "peakfit/multi_index.hpp"

using namespace peakfit;

TEST_CASE("holder order") {
  CHECK(holder_order(3.0) == 2);
  CHECK(holder_order(2.5) == 2);
  CHECK(holder_order(2.0001) == 2);
  CHECK(holder_order(4.0) == 3);
  CHECK(holder_order(0.5) == 0);
  CHECK(holder_order(1.0) == 0);
  CHECK_THROWS_AS(holder_order(0.0), ConfigError);
  CHECK_THROWS_AS(holder_order(-1.0), ConfigError);
}

TEST_CASE("enumeration matches the stated small cases") {
  const MultiIndexSet r2d1(1, 2);
  REQUIRE(r2d1.size() == 3);
  CHECK(r2d1[0].entries() == std::vector<int>{0});
  CHECK(r2d1[1].entries() == std::vector<int>{1});
  CHECK(r2d1[2].entries() == std::vector<int>{2});

  const MultiIndexSet r0d3(3, 0);
  REQUIRE(r0d3.size() == 1);
  CHECK(r0d3[0].entries() == std::vector<int>{0, 0, 0});

  const MultiIndexSet r2d2(2, 2);
  REQUIRE(r2d2.size() == 6);
  const std::vector<std::vector<int>> expected{{0, 0}, {0, 1}, {1, 0},
                                               {0, 2}, {1, 1}, {2, 0}};
  for (std::size_t i = 0; i < expected.size(); ++i) {
    CHECK(r2d2[i].entries() == expected[i]);
  }
}

TEST_CASE("enumeration golden file, r=3 d=3") {
  const MultiIndexSet set(3, 3);
  std::ifstream golden(std::string(PEAKFIT_TEST_DIR) + "/golden/index_set_r3_d3.txt");
  REQUIRE(golden.good());
  std::string line;
  std::size_t pos = 0;
  while (std::getline(golden, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::vector<int> entries;
    int v;
    while (ss >> v) entries.push_back(v);
    REQUIRE(pos < set.size());
    CHECK(set[pos].entries() == entries);
    ++pos;
  }
  CHECK(pos == set.size());
}

TEST_CASE("index set size formula") {
  CHECK(index_set_size(2, 2) == 6);
  CHECK(index_set_size(5, 1) == 6);
  CHECK(index_set_size(0, 7) == 1);
  // exhaustive agreement with the enumeration
  for (int d = 1; d <= 4; ++d) {
    for (int r = 0; r <= 6; ++r) {
      CHECK(static_cast<std::int64_t>(MultiIndexSet(d, r).size()) == index_set_size(r, d));
    }
  }
}

TEST_CASE("enumeration order invariant") {
  for (int d = 1; d <= 4; ++d) {
    for (int r = 0; r <= 6; ++r) {
      const MultiIndexSet set(d, r);
      CHECK(set[0].degree() == 0);
      for (std::size_t i = 1; i < set.size(); ++i) {
        CHECK(set[i - 1].degree() <= set[i].degree());
        if (set[i - 1].degree() == set[i].degree()) {
          CHECK(std::lexicographical_compare(
              set[i - 1].entries().begin(), set[i - 1].entries().end(),
              set[i].entries().begin(), set[i].entries().end()));
        }
        CHECK(canonical_less(set[i - 1], set[i]));
      }
    }
  }
}

TEST_CASE("position_of round-trips") {
  const MultiIndexSet set(3, 4);
  for (std::size_t i = 0; i < set.size(); ++i) {
    REQUIRE(set.position_of(set[i]).has_value());
    CHECK(*set.position_of(set[i]) == i);
  }
  CHECK(!set.position_of(MultiIndex({5, 0, 0})).has_value());
  CHECK(!set.position_of(MultiIndex({1, 1})).has_value());
}

TEST_CASE("monomial evaluation") {
  const std::vector<double> x{2.0, 3.0};
  CHECK(monomial_eval(x, MultiIndex({1, 2})) == doctest::Approx(18.0));
  CHECK(monomial_eval(x, MultiIndex::zero(2)) == 1.0);
  const std::vector<double> zero{0.0, 0.0};
  CHECK(monomial_eval(zero, MultiIndex::zero(2)) == 1.0);  // 0^0 = 1
  const std::vector<double> y{0.5, -1.0};
  CHECK(monomial_eval(y, MultiIndex({0, 3})) == doctest::Approx(-1.0));
  CHECK_THROWS_AS(monomial_eval(x, MultiIndex({1, 2, 3})), ConfigError);
  CHECK_THROWS_AS(MultiIndex({-1, 0}), ConfigError);
}

// |x^i - y^i| <= ||x-y|| sum_{k=1}^{|i|} ||x||^{|i|-k} ||y||^{k-1}
TEST_CASE("monomial difference bound, 1e4 random draws") {
  std::mt19937_64 gen(20240811);
  std::uniform_real_distribution<double> coord(-2.0, 2.0);
  std::uniform_int_distribution<int> dim_draw(1, 3);
  for (int rep = 0; rep < 10000; ++rep) {
    const int d = dim_draw(gen);
    std::uniform_int_distribution<int> deg_draw(1, 6);
    const int target = deg_draw(gen);
    // random index with |i| == target
    std::vector<int> entries(static_cast<std::size_t>(d), 0);
    std::uniform_int_distribution<int> which(0, d - 1);
    for (int t = 0; t < target; ++t) ++entries[static_cast<std::size_t>(which(gen))];
    const MultiIndex i(entries);

    std::vector<double> x(static_cast<std::size_t>(d)), y(static_cast<std::size_t>(d));
    double diff2 = 0.0, nx2 = 0.0, ny2 = 0.0;
    for (int k = 0; k < d; ++k) {
      const auto ku = static_cast<std::size_t>(k);
      x[ku] = coord(gen);
      y[ku] = coord(gen);
      diff2 += (x[ku] - y[ku]) * (x[ku] - y[ku]);
      nx2 += x[ku] * x[ku];
      ny2 += y[ku] * y[ku];
    }
    const double nx = std::sqrt(nx2), ny = std::sqrt(ny2);
    double bound = 0.0;
    for (int k = 1; k <= i.degree(); ++k) {
      bound += std::pow(nx, i.degree() - k) * std::pow(ny, k - 1);
    }
    bound *= std::sqrt(diff2);
    const double lhs = std::abs(monomial_eval(x, i) - monomial_eval(y, i));
    CHECK(lhs <= bound * (1.0 + 1e-12) + 1e-12);
  }
}
