#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "gbspe/estimators.hpp"
#include "gbspe/hafnian.hpp"
#include "gbspe/problem.hpp"
#include "support.hpp"

using namespace gbspe;

namespace {

SymmetricMatrix four_by_four() {
  // Off-diagonals a12..a34 = 1..6, zero diagonal.
  SymmetricMatrix a(4);
  a.set(0, 1, 1);
  a.set(0, 2, 2);
  a.set(0, 3, 3);
  a.set(1, 2, 4);
  a.set(1, 3, 5);
  a.set(2, 3, 6);
  return a;
}

}  // namespace

TEST_CASE("dense hafnian examples") {
  SymmetricMatrix two(2);
  two.set(0, 0, 0.3);
  two.set(0, 1, 0.7);
  two.set(1, 1, 0.1);
  CHECK(hafnian_dense(two) == 0.7);
  CHECK(hafnian_dense(four_by_four()) == 28.0);
  CHECK(hafnian_trace(four_by_four()) == doctest::Approx(28.0).epsilon(1e-13));
  CHECK(hafnian_dense(SymmetricMatrix(0)) == 1.0);
  CHECK_THROWS_AS(hafnian_dense(SymmetricMatrix(3)), std::invalid_argument);
  CHECK_THROWS_AS(hafnian_trace(SymmetricMatrix(5)), std::invalid_argument);
}

TEST_CASE("hafnian paths agree with the bitmask oracle") {
  RngStream rng(17);
  for (std::size_t m = 2; m <= 14; m += 2) {
    for (int rep = 0; rep < 10; ++rep) {
      const SymmetricMatrix a = testing::random_symmetric(rng, m);
      const double reference = static_cast<double>(oracle::hafnian(testing::to_oracle(a)));
      const double scale = std::max(std::abs(reference), 1e-3);
      CHECK(std::abs(hafnian_trace(a) - reference) <= 1e-10 * scale);
      CHECK(std::abs(hafnian_dense(a) - reference) <= 1e-10 * scale);
      if (m <= 12) CHECK(std::abs(hafnian_reference(a) - reference) <= 1e-10 * scale);
    }
  }
}

TEST_CASE("multi-index hafnian examples") {
  SymmetricMatrix beta(1);
  beta.set(0, 0, 0.37);
  CHECK(hafnian_multiindex(beta, MultiIndex({2})) == 0.37);
  CHECK(hafnian_multiindex(beta, MultiIndex({0})) == 1.0);

  SymmetricMatrix b(2);
  b.set(0, 0, 0.9);
  b.set(1, 1, 0.8);
  b.set(0, 1, 0.25);
  CHECK(hafnian_multiindex(b, MultiIndex({1, 1})) == 0.25);
  CHECK_THROWS_AS(hafnian_multiindex(b, MultiIndex({1, 0})), std::invalid_argument);
  CHECK_THROWS_AS(hafnian_multiindex(b, MultiIndex({2})), std::invalid_argument);

  const SymmetricMatrix e = expand_multiindex(b, MultiIndex({2, 1}));
  CHECK(e.dimension() == 3);
  CHECK(e(0, 1) == 0.9);
  CHECK(e(1, 2) == 0.25);
  CHECK(e(2, 2) == 0.8);
}

TEST_CASE("repeated-index hafnians agree with the expanded oracle") {
  RngStream rng(23);
  for (std::size_t n = 1; n <= 4; ++n) {
    const SymmetricMatrix b = testing::random_symmetric(rng, n);
    for (int degree = 2; degree <= 12; degree += 2) {
      for (const MultiIndex& index : enumerate_degree(n, degree)) {
        const double reference = static_cast<double>(oracle::hafnian_index(testing::to_oracle(b), testing::entries(index)));
        const double scale = std::max(std::abs(reference), 1e-3);
        CHECK(std::abs(hafnian_repeated(b, index) - reference) <= 1e-10 * scale);
        CHECK(std::abs(hafnian_multiindex(b, index) - reference) <= 1e-10 * scale);
      }
    }
  }
}

TEST_CASE("one-dimensional Gaussian moments") {
  SymmetricMatrix b(1);
  b.set(0, 0, 0.6);
  for (int k = 0; k <= 16; ++k) {
    const double expected = static_cast<double>(oracle::double_factorial(2 * k - 1)) * std::pow(0.6, k);
    CHECK(hafnian_multiindex(b, MultiIndex({2 * k})) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("hafnian homogeneity and permutation equivariance") {
  RngStream rng(29);
  const SymmetricMatrix b = testing::random_symmetric(rng, 3);
  const MultiIndex index({3, 2, 3});
  const double base = hafnian_multiindex(b, index);
  CHECK(hafnian_multiindex(b.scaled(0.7), index) == doctest::Approx(std::pow(0.7, 4) * base).epsilon(1e-12));

  std::vector<std::size_t> perm{2, 0, 1};
  SymmetricMatrix pb(3);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = i; j < 3; ++j) pb.set(i, j, b(perm[i], perm[j]));
  const MultiIndex pindex({index[perm[0]], index[perm[1]], index[perm[2]]});
  CHECK(hafnian_multiindex(pb, pindex) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("hafnian signs") {
  RngStream rng(31);
  HafnianCache cache;
  const SymmetricMatrix any = testing::random_symmetric(rng, 3);
  CHECK(hafnian_sign(any, MultiIndex({0, 0, 0}), cache) == 1);

  SymmetricMatrix positive(3);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = i; j < 3; ++j) positive.set(i, j, 0.1 + rng.uniform01());
  for (const MultiIndex& index : enumerate_degree(3, 6)) CHECK(hafnian_sign(positive, index, cache) == 1);

  SymmetricMatrix neg(2);
  neg.set(0, 0, 0.5);
  neg.set(1, 1, 0.5);
  neg.set(0, 1, -0.4);
  CHECK(hafnian_sign(neg, MultiIndex({1, 1}), cache) == -1);
  CHECK(sign_of(5e-15) == 0);
  CHECK(sign_of(-2e-14) == -1);
}

TEST_CASE("cache hits are bit-identical to recomputation") {
  RngStream rng(37);
  const SymmetricMatrix b = testing::random_symmetric(rng, 3);
  HafnianCache cache;
  for (const MultiIndex& index : enumerate_degree(3, 8)) {
    const double fresh = hafnian_multiindex(b, index);
    const double first = hafnian_multiindex(b, index, cache);
    const double second = hafnian_multiindex(b, index, cache);
    CHECK(fresh == first);
    CHECK(first == second);
  }
  CHECK(cache.size() == count_sigma(3, 4));
}

TEST_CASE("cache persistence and corrupt tails") {
  const auto dir = testing::scratch_dir("cache");
  const auto path = dir / "haf.cache";
  RngStream rng(41);
  const SymmetricMatrix b = testing::random_symmetric(rng, 2);
  {
    HafnianCache cache;
    for (const MultiIndex& index : enumerate_degree(2, 6)) hafnian_multiindex(b, index, cache);
    CHECK(cache.append_new_entries(path) == 7);
    CHECK(cache.append_new_entries(path) == 0);
  }
  const auto intact = std::filesystem::file_size(path);
  {
    HafnianCache cache;
    const auto report = cache.load(path);
    CHECK(report.records == 7);
    CHECK(report.truncated_bytes == 0);
    CHECK(*cache.find(b.fingerprint(), MultiIndex({3, 3})) == hafnian_multiindex(b, MultiIndex({3, 3})));
  }
  {
    std::ofstream out(path, std::ios::binary | std::ios::app);
    out << "garbage";
  }
  {
    HafnianCache cache;
    const auto report = cache.load(path);
    CHECK(report.records == 7);
    CHECK(report.truncated_bytes == 7);
    CHECK(std::filesystem::file_size(path) == intact);
  }
  // Damage the last record's checksum: only that record is dropped.
  {
    std::fstream io(path, std::ios::binary | std::ios::in | std::ios::out);
    io.seekp(static_cast<std::streamoff>(intact - 1));
    io.put('\x5a');
  }
  HafnianCache cache;
  const auto report = cache.load(path);
  CHECK(report.records == 6);
  CHECK(report.truncated_bytes > 0);
}

TEST_CASE("batch hafnians over a degree slice") {
  SymmetricMatrix b(2);
  b.set(0, 0, 0.4);
  b.set(1, 1, 0.2);
  b.set(0, 1, -0.3);
  HafnianCache cache;
  const DegreeHafnians h = batch_hafnians_degree(b, 1.0, 1, cache);
  REQUIRE(h.values.size() == 3);
  CHECK(h.values[0] == 0.2);   // (0,2)
  CHECK(h.values[1] == -0.3);  // (1,1)
  CHECK(h.values[2] == 0.4);   // (2,0)

  RngStream rng(43);
  const SymmetricMatrix r = testing::random_symmetric(rng, 3);
  const DegreeHafnians unit = batch_hafnians_degree(r, 1.0, 3, cache);
  const DegreeHafnians scaled = batch_hafnians_degree(r, 1.3, 3, cache);
  const DegreeHafnians direct = batch_hafnians_degree(r.scaled(1.3), 1.0, 3, cache);
  for (std::size_t i = 0; i < unit.values.size(); ++i) {
    CHECK(scaled.values[i] == doctest::Approx(std::pow(1.3, 3) * unit.values[i]).epsilon(1e-12));
    CHECK(direct.values[i] == doctest::Approx(scaled.values[i]).epsilon(1e-12));
  }
}

TEST_CASE("Wick consistency against Gaussian sampling") {
  // E[x^I] for x ~ N(0, B) equals Haf(B_I).
  RngStream rng(47);
  const SampledCovariance cov = sample_covariance(rng, 3);
  const DenseMatrix& u = cov.eigen.basis;
  const std::vector<MultiIndex> indices{MultiIndex({2, 0, 0}), MultiIndex({1, 1, 0}), MultiIndex({2, 1, 1}),
                                        MultiIndex({0, 0, 4}), MultiIndex({1, 2, 1})};
  const int draws = 10'000'000;
  std::vector<double> sum(indices.size(), 0.0), sum2(indices.size(), 0.0);
  double x[3], z[3];
  for (int d = 0; d < draws; ++d) {
    for (double& v : z) v = rng.normal();
    for (std::size_t i = 0; i < 3; ++i) {
      x[i] = 0.0;
      for (std::size_t j = 0; j < 3; ++j) x[i] += u(i, j) * std::sqrt(cov.eigen.eigenvalues[j]) * z[j];
    }
    for (std::size_t k = 0; k < indices.size(); ++k) {
      double m = 1.0;
      for (std::size_t i = 0; i < 3; ++i) m *= std::pow(x[i], indices[k][i]);
      sum[k] += m;
      sum2[k] += m * m;
    }
  }
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const double mean = sum[k] / draws;
    const double se = std::sqrt((sum2[k] / draws - mean * mean) / draws);
    CHECK(std::abs(mean - hafnian_multiindex(cov.covariance, indices[k])) <= 4.0 * se);
  }
}

TEST_CASE("hafnian cost is positive and grows with degree") {
  CHECK(hafnian_cost(MultiIndex({1, 1})) > 0.0);
  CHECK(hafnian_cost(MultiIndex({4, 4, 4, 4})) < hafnian_cost(MultiIndex({8, 8, 8, 8})));
  CHECK(hafnian_cost(MultiIndex({1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1})) > 0.0);
}
