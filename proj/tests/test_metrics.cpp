// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "oracles/oracles.hpp"
#include "pvbf/errors.hpp"
#include "pvbf/metrics.hpp"
#include "pvbf/rng.hpp"

using namespace pvbf;

TEST_CASE("acc") {
  AccuracyMatrix one(1);
  one.set(0, 0, 0.8);
  CHECK(acc(one) == 0.8);

  AccuracyMatrix m(2);
  m.set(0, 0, 0.9);
  m.set(0, 1, 0.8);
  m.set(1, 1, 0.6);
  CHECK(acc(m) == doctest::Approx(0.7).epsilon(1e-15));
  CHECK_THROWS_AS(acc(AccuracyMatrix(2)), ContractError);
}

TEST_CASE("fr") {
  AccuracyMatrix m(2);
  m.set(0, 0, 0.9);
  m.set(0, 1, 0.5);
  m.set(1, 1, 0.7);
  CHECK(fr(m) == doctest::Approx(0.4).epsilon(1e-15));

  AccuracyMatrix one(1);
  one.set(0, 0, 1.0);
  CHECK_THROWS_AS(fr(one), ContractError);

  SUBCASE("never negative") {
    AccuracyMatrix up(2);
    up.set(0, 0, 0.2);
    up.set(0, 1, 0.9);
    up.set(1, 1, 0.9);
    CHECK(fr(up) == 0.0);
  }
}

TEST_CASE("cells are validated") {
  AccuracyMatrix m(2);
  CHECK_THROWS_AS(m.set(0, 0, 1.5), ContractError);
  CHECK_THROWS_AS(m.set(0, 0, std::nan("")), ContractError);
  CHECK_THROWS_AS(m.set(2, 0, 0.5), ContractError);
  CHECK_FALSE(m.has(1, 0));
  CHECK_THROWS_AS(m.at(1, 0), ContractError);
}

TEST_CASE("random full matrices match the literal formulas") {
  Rng rng(10);
  for (int t = 0; t < 50; ++t) {
    const std::size_t k = 2 + uniform_index(rng, 6);
    AccuracyMatrix m(k);
    std::vector<std::vector<double>> a(k, std::vector<double>(k));
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j) {
        a[i][j] = unit_uniform(rng);
        m.set(i, j, a[i][j]);
      }
    }
    CHECK(std::fabs(acc(m) - oracle::acc_literal(a)) < 1e-12);
    CHECK(std::fabs(fr(m) - oracle::fr_literal(a)) < 1e-12);
  }
}

TEST_CASE("ci95") {
  const auto ci = ci95(std::vector<double>{0.0, 1.0});
  CHECK(ci.mean == 0.5);
  CHECK(ci.half_width == doctest::Approx(0.9799999999999999).epsilon(1e-15));
  CHECK(ci95(std::vector<double>{0.3, 0.3, 0.3}).half_width == 0.0);
  CHECK_THROWS_AS(ci95(std::vector<double>{0.5}), ContractError);
}
