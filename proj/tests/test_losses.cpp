#include <catch2/catch_amalgamated.hpp>

#include "feddmf/losses.hpp"
#include "feddmf/rng.hpp"
#include "support/oracles.hpp"

using feddmf::Matrix;
using feddmf::Rng;

TEST_CASE("mse of identical vectors is zero with zero gradient") {
  Matrix p(3, 1), t(3, 1);
  p.data = {0.2, -1.0, 4.0};
  t.data = p.data;
  const auto r = feddmf::mse_loss(p, t);
  REQUIRE(r.loss == 0.0);
  for (double v : r.grad_pred.data) REQUIRE(v == 0.0);
}

TEST_CASE("mse single element: pred 1, target 0") {
  Matrix p(1, 1, 1.0), t(1, 1, 0.0);
  const auto r = feddmf::mse_loss(p, t);
  REQUIRE(r.loss == Catch::Approx(1.0));
  REQUIRE(r.grad_pred.at(0, 0) == Catch::Approx(2.0));
}

TEST_CASE("mse matches the brute-force summation oracle") {
  Rng rng(61);
  Matrix p(7, 1), t(7, 1);
  for (double& v : p.data) v = rng.uniform(-2.0, 2.0);
  for (double& v : t.data) v = rng.uniform(-2.0, 2.0);
  const auto r = feddmf::mse_loss(p, t);
  double expect = 0.0;
  for (std::size_t i = 0; i < 7; ++i)
    expect += (p.data[i] - t.data[i]) * (p.data[i] - t.data[i]);
  expect /= 7.0;
  REQUIRE(r.loss == Catch::Approx(expect).margin(1e-12));
  for (std::size_t i = 0; i < 7; ++i)
    REQUIRE(r.grad_pred.data[i] ==
            Catch::Approx(2.0 / 7.0 * (p.data[i] - t.data[i])).margin(1e-12));
}

TEST_CASE("mse rejects empty batch and shape mismatch") {
  Matrix e(0, 1), t1(1, 1), t2(2, 1);
  REQUIRE_THROWS_AS(feddmf::mse_loss(e, e), std::invalid_argument);
  REQUIRE_THROWS_WITH(feddmf::mse_loss(t1, t2), Catch::Matchers::ContainsSubstring("1x1"));
}

TEST_CASE("mse gradient matches finite differences") {
  Rng rng(67);
  Matrix p(5, 1), t(5, 1);
  for (double& v : p.data) v = rng.uniform(-1.0, 1.0);
  for (double& v : t.data) v = rng.uniform(-1.0, 1.0);
  auto loss = [&]() { return feddmf::mse_loss(p, t).loss; };
  const auto r = feddmf::mse_loss(p, t);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double fd = oracle::fd_central(loss, p.data[i]);
    REQUIRE(oracle::rel_err(r.grad_pred.data[i], fd) < 1e-5);
  }
}

TEST_CASE("cosine margin loss of identical rows is beta * margin with zero gradient") {
  Matrix a(1, 3);
  a.data = {0.3, -0.2, 0.9};
  const auto r = feddmf::cosine_margin_loss(a, a, 0.2, 100.0);
  REQUIRE(r.loss == Catch::Approx(20.0));
  for (double v : r.grad_local.data) REQUIRE(v == 0.0);
}

TEST_CASE("cosine margin loss of orthogonal rows is beta") {
  Matrix a(1, 2), b(1, 2);
  a.data = {1.0, 0.0};
  b.data = {0.0, 1.0};
  const auto r = feddmf::cosine_margin_loss(a, b, 0.2, 100.0);
  REQUIRE(r.loss == Catch::Approx(100.0));
}

TEST_CASE("cosine margin gradient matches finite differences on active rows") {
  Rng rng(71);
  Matrix local(4, 8), peer(4, 8);
  for (double& v : local.data) v = rng.uniform(-1.0, 1.0);
  for (double& v : peer.data) v = rng.uniform(-1.0, 1.0);
  const double m = 0.2, beta = 100.0;
  auto loss = [&]() { return feddmf::cosine_margin_loss(local, peer, m, beta).loss; };
  const auto r = feddmf::cosine_margin_loss(local, peer, m, beta);
  for (std::size_t row = 0; row < 4; ++row) {
    // only check rows clearly on the active branch
    double aa = 0, ab = 0, bb = 0;
    for (std::size_t k = 0; k < 8; ++k) {
      aa += local.at(row, k) * local.at(row, k);
      ab += local.at(row, k) * peer.at(row, k);
      bb += peer.at(row, k) * peer.at(row, k);
    }
    const double dist = 1.0 - ab / std::sqrt(aa * bb);
    if (dist < m + 1e-3) continue;
    for (std::size_t k = 0; k < 8; ++k) {
      const double fd = oracle::fd_central(loss, local.at(row, k));
      REQUIRE(oracle::rel_err(r.grad_local.at(row, k), fd) < 1e-5);
    }
  }
}

TEST_CASE("cosine margin loss never drops below beta * margin") {
  Rng rng(73);
  for (int trial = 0; trial < 50; ++trial) {
    Matrix a(3, 4), b(3, 4);
    for (double& v : a.data) v = rng.uniform(-1.0, 1.0) + 0.01;
    for (double& v : b.data) v = rng.uniform(-1.0, 1.0) + 0.01;
    const double m = rng.uniform(0.0, 0.9);
    const auto r = feddmf::cosine_margin_loss(a, b, m, 100.0);
    REQUIRE(r.loss >= 100.0 * m - 1e-9);
  }
}

TEST_CASE("cosine margin loss is invariant to positive rescaling of a row") {
  Rng rng(79);
  Matrix a(3, 5), b(3, 5);
  for (double& v : a.data) v = rng.uniform(0.1, 1.0);
  for (double& v : b.data) v = rng.uniform(0.1, 1.0);
  const double base = feddmf::cosine_margin_loss(a, b, 0.2, 100.0).loss;
  for (std::size_t k = 0; k < 5; ++k) a.at(1, k) *= 37.5;
  const double scaled = feddmf::cosine_margin_loss(a, b, 0.2, 100.0).loss;
  REQUIRE(scaled == Catch::Approx(base).margin(1e-9));
}

TEST_CASE("cosine margin loss rejects zero-norm rows naming the row") {
  Matrix a(2, 2), b(2, 2, 1.0);
  a.at(0, 0) = 1.0;  // row 1 stays zero
  REQUIRE_THROWS_WITH(feddmf::cosine_margin_loss(a, b, 0.2, 100.0),
                      Catch::Matchers::ContainsSubstring("row 1") &&
                          Catch::Matchers::ContainsSubstring("local"));
  REQUIRE_THROWS_WITH(feddmf::cosine_margin_loss(b, a, 0.2, 100.0),
                      Catch::Matchers::ContainsSubstring("peer"));
}

TEST_CASE("rows inside the margin contribute exactly zero gradient") {
  Matrix a(2, 2), b(2, 2);
  // row 0: nearly aligned (dist ~ 0 < m); row 1: orthogonal (dist 1 > m)
  a.data = {1.0, 0.01, 1.0, 0.0};
  b.data = {1.0, 0.0, 0.0, 1.0};
  const auto r = feddmf::cosine_margin_loss(a, b, 0.2, 100.0);
  REQUIRE(r.grad_local.at(0, 0) == 0.0);
  REQUIRE(r.grad_local.at(0, 1) == 0.0);
  REQUIRE(r.grad_local.at(1, 1) != 0.0);
}
