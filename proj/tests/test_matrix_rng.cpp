#include <catch2/catch_amalgamated.hpp>

#include "feddmf/matrix.hpp"
#include "feddmf/rng.hpp"
#include "support/oracles.hpp"

using feddmf::Matrix;
using feddmf::Rng;

TEST_CASE("matmul matches naive triple loop") {
  Rng rng(7);
  Matrix a(4, 6), b(6, 3);
  for (double& v : a.data) v = rng.uniform(-2.0, 2.0);
  for (double& v : b.data) v = rng.uniform(-2.0, 2.0);
  const Matrix c = feddmf::matmul(a, b);
  const Matrix expect = oracle::matmul_naive(a, b);
  REQUIRE(c.rows == 4);
  REQUIRE(c.cols == 3);
  for (std::size_t i = 0; i < c.size(); ++i)
    REQUIRE(c.data[i] == Catch::Approx(expect.data[i]).margin(1e-12));
}

TEST_CASE("matmul rejects mismatched inner dims") {
  Matrix a(2, 3), b(4, 2);
  REQUIRE_THROWS_WITH(feddmf::matmul(a, b), Catch::Matchers::ContainsSubstring("2x3"));
}

TEST_CASE("matmul_a_bt and matmul_at_b_accum agree with naive transpose products") {
  Rng rng(11);
  Matrix a(5, 4), b(3, 4);
  for (double& v : a.data) v = rng.uniform(-1.0, 1.0);
  for (double& v : b.data) v = rng.uniform(-1.0, 1.0);
  Matrix bt(4, 3);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t k = 0; k < 4; ++k) bt.at(k, i) = b.at(i, k);
  const Matrix expect = oracle::matmul_naive(a, bt);
  const Matrix got = feddmf::matmul_a_bt(a, b);
  for (std::size_t i = 0; i < got.size(); ++i)
    REQUIRE(got.data[i] == Catch::Approx(expect.data[i]).margin(1e-12));

  Matrix g(5, 2);
  for (double& v : g.data) v = rng.uniform(-1.0, 1.0);
  Matrix at(4, 5);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t k = 0; k < 4; ++k) at.at(k, i) = a.at(i, k);
  const Matrix expect2 = oracle::matmul_naive(at, g);
  Matrix acc(4, 2);
  feddmf::matmul_at_b_accum(a, g, acc);
  for (std::size_t i = 0; i < acc.size(); ++i)
    REQUIRE(acc.data[i] == Catch::Approx(expect2.data[i]).margin(1e-12));
}

TEST_CASE("gather_rows copies the selected rows") {
  Matrix t(4, 2);
  for (std::size_t i = 0; i < t.size(); ++i) t.data[i] = static_cast<double>(i);
  const std::vector<std::uint32_t> rows = {3, 0, 3};
  const Matrix g = feddmf::gather_rows(t, rows);
  REQUIRE(g.rows == 3);
  REQUIRE(g.at(0, 0) == 6.0);
  REQUIRE(g.at(1, 1) == 1.0);
  REQUIRE(g.at(2, 1) == 7.0);
}

TEST_CASE("same seed produces an identical stream") {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) REQUIRE(a.next_u64() == b.next_u64());
}

TEST_CASE("uniform stays in [0,1) and covers the range") {
  Rng rng(3);
  double lo = 1.0, hi = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  REQUIRE(lo < 0.01);
  REQUIRE(hi > 0.99);
}

TEST_CASE("uniform_index is unbiased enough and in range") {
  Rng rng(5);
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 70000; ++i) ++counts[rng.uniform_index(7)];
  for (int c : counts) REQUIRE(std::abs(c - 10000) < 500);
  REQUIRE_THROWS_AS(rng.uniform_index(0), std::invalid_argument);
}

TEST_CASE("shuffle is a deterministic permutation per seed") {
  std::vector<int> v1(50), v2(50);
  for (int i = 0; i < 50; ++i) v1[i] = v2[i] = i;
  Rng a(9), b(9);
  a.shuffle(v1);
  b.shuffle(v2);
  REQUIRE(v1 == v2);
  std::vector<int> sorted = v1;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 50; ++i) REQUIRE(sorted[i] == i);
}

TEST_CASE("derive_seed separates streams") {
  const std::uint64_t s = 123;
  REQUIRE(feddmf::derive_seed(s, 1) != feddmf::derive_seed(s, 2));
  REQUIRE(feddmf::derive_seed(s, 1, 0) != feddmf::derive_seed(s, 1, 1));
  REQUIRE(feddmf::derive_seed(s, 1, 1) == feddmf::derive_seed(s, 1, 1));
}
