#include <doctest.h>

#include "gbspe/multiindex.hpp"
#include "oracles.hpp"

using namespace gbspe;

TEST_CASE("enumerate_degree examples") {
  const auto two = enumerate_degree(2, 2);
  REQUIRE(two.size() == 3);
  CHECK(two[0] == MultiIndex({0, 2}));
  CHECK(two[1] == MultiIndex({1, 1}));
  CHECK(two[2] == MultiIndex({2, 0}));
  CHECK(enumerate_degree(3, 4).size() == 15);
  const auto zero = enumerate_degree(1, 0);
  REQUIRE(zero.size() == 1);
  CHECK(zero[0] == MultiIndex({0}));
}

TEST_CASE("enumeration is sorted, complete and stable") {
  for (std::size_t n = 1; n <= 6; ++n) {
    for (int k = 0; k <= 8; ++k) {
      const auto list = enumerate_degree(n, 2 * k);
      CHECK(list.size() == count_sigma(static_cast<int>(n), k));
      CHECK(std::is_sorted(list.begin(), list.end()));
      CHECK(std::adjacent_find(list.begin(), list.end()) == list.end());
      CHECK(list == *degree_patterns(n, 2 * k));
      for (std::size_t i = 0; i < list.size(); i += 7) CHECK(lex_rank(list[i].entries(), 2 * k) == i);
    }
  }
}

TEST_CASE("count_sigma") {
  CHECK(count_sigma(3, 2) == 15);
  CHECK(count_sigma(1, 5) == 1);
  // Brute-force oracle count.
  CHECK(oracle::compositions(6, 4).size() == 126);
  CHECK(count_sigma(6, 2) == 126);
}

TEST_CASE("multi-index factorial") {
  CHECK(factorial(MultiIndex({0, 0, 0})) == 1.0);
  CHECK(factorial(MultiIndex({2, 1, 1})) == 2.0);
  CHECK(factorial(MultiIndex({4, 0, 2})) == 48.0);
  CHECK(factorial(MultiIndex({20})) == 2432902008176640000.0);
  CHECK(factorial(MultiIndex({32})) == doctest::Approx(2.631308369336935e35).epsilon(1e-12));
  CHECK(factorial(MultiIndex({16, 16})) == doctest::Approx(20922789888000.0 * 20922789888000.0).epsilon(1e-12));
}

TEST_CASE("multi-index addition") {
  CHECK(MultiIndex({1, 0}) + MultiIndex({0, 1}) == MultiIndex({1, 1}));
  CHECK(MultiIndex({2, 2}) + MultiIndex({0, 0}) == MultiIndex({2, 2}));
  CHECK(MultiIndex({1, 2, 3}) + MultiIndex({3, 2, 1}) == MultiIndex({4, 4, 4}));
  CHECK((MultiIndex({1, 2}) + MultiIndex({3, 4})).degree() == 10);
  CHECK_THROWS_AS(MultiIndex({1}) + MultiIndex({1, 0}), std::invalid_argument);
}

TEST_CASE("multi-index parsing and rendering") {
  CHECK(MultiIndex::parse("1, 0,3") == MultiIndex({1, 0, 3}));
  CHECK(MultiIndex({4, 0, 2}).to_string() == "4,0,2");
  CHECK_THROWS(MultiIndex::parse("1,-2"));
  CHECK_THROWS(MultiIndex::parse("a,1"));
  CHECK_THROWS(MultiIndex::parse(""));
  CHECK_THROWS(MultiIndex(std::vector<int>{1, -1}));
}

TEST_CASE("binomial") {
  CHECK(binomial(5, 2) == 10);
  CHECK(binomial(37, 5) == 435897);
  CHECK(binomial(3, 5) == 0);
}
