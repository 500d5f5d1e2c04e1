// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <cstring>

#include "oracles/oracles.hpp"
#include "pvbf/dcwr.hpp"
#include "pvbf/errors.hpp"
#include "test_support.hpp"

using namespace pvbf;

namespace {

// 1 -> 2 classes with a linear head: every classifier row is (w, b).
LayoutPtr head_layout(std::size_t classes) { return testing::make_layout(1, {}, classes); }

std::vector<double> row_of(std::span<const double> s) { return {s.begin(), s.end()}; }

}  // namespace

TEST_CASE("sensory memory is mean-shifted") {
  auto layout = head_layout(3);
  ParameterStore store(layout);
  store.set_classifier_row(0, std::vector<double>{2.0, 4.0});
  store.set_classifier_row(2, std::vector<double>{0.0, 0.0});
  store.set_classifier_row(1, std::vector<double>{9.0, 9.0});
  const std::vector<int> labels{2, 0, 0};
  const SensoryMemory sm = sensory(store, labels);
  CHECK(sm.classes == std::vector<int>{0, 2});
  CHECK(sm.rows[0] == std::vector<double>{1.0, 2.0});
  CHECK(sm.rows[1] == std::vector<double>{-1.0, -2.0});
}

TEST_CASE("sensory rows sum to zero") {
  auto layout = testing::make_layout(3, {4}, 6);
  Rng rng(1);
  const ParameterStore store = ParameterStore::initialized(layout, rng);
  const std::vector<int> labels{5, 1, 3, 3};
  const SensoryMemory sm = sensory(store, labels);
  for (std::size_t i = 0; i < layout->classifier_row_length(); ++i) {
    double s = 0.0;
    for (const auto& r : sm.rows) s += r[i];
    CHECK(std::fabs(s) < 1e-12);
  }
}

TEST_CASE("consolidation arithmetic") {
  ClassifierMemoryBank bank(2, 2);
  SensoryMemory sm{{0}, {{1.0, 2.0}}};
  const std::map<int, std::uint64_t> u{{0, 4}};

  SUBCASE("first occurrence copies the sensory row") {
    bank.consolidate(sm, u, 0.5, std::vector<double>{0.0});
    CHECK(row_of(bank.short_term(0)) == std::vector<double>{1.0, 2.0});
    CHECK(row_of(bank.long_term(0)) == std::vector<double>{1.0, 2.0});
    CHECK(bank.occurrences(0) == 4);
    CHECK(bank.occurrences(1) == 0);
  }
  SUBCASE("second occurrence with P = U") {
    bank.consolidate(sm, u, 0.5, std::vector<double>{0.0});
    SensoryMemory next{{0}, {{3.0, 0.0}}};
    bank.consolidate(next, u, 0.5, std::vector<double>{0.0});
    // eta_c = eta_l = 1: plain averages.
    CHECK(row_of(bank.short_term(0)) == std::vector<double>{2.0, 1.0});
    CHECK(row_of(bank.long_term(0)) == std::vector<double>{1.5, 1.5});
    CHECK(bank.occurrences(0) == 8);
  }
  SUBCASE("epsilon at or above p skips the short-term update") {
    bank.consolidate(sm, u, 0.5, std::vector<double>{0.5});
    CHECK(row_of(bank.short_term(0)) == std::vector<double>{0.0, 0.0});
    CHECK(row_of(bank.long_term(0)) == std::vector<double>{0.0, 0.0});
    CHECK(bank.occurrences(0) == 4);
  }
  SUBCASE("p = 0 never writes short-term memory") {
    Rng rng(3);
    for (int i = 0; i < 20; ++i) bank.consolidate(sm, u, 0.0, rng);
    CHECK(row_of(bank.short_term(0)) == std::vector<double>{0.0, 0.0});
  }
  SUBCASE("p = 1 always writes short-term memory") {
    Rng rng(3);
    bank.consolidate(sm, u, 1.0, rng);
    CHECK(row_of(bank.short_term(0)) == std::vector<double>{1.0, 2.0});
  }
  SUBCASE("mismatched inputs") {
    CHECK_THROWS_AS(bank.consolidate(sm, {{1, 4}}, 0.5, std::vector<double>{0.0}), ContractError);
    CHECK_THROWS_AS(bank.consolidate(sm, u, 0.5, std::vector<double>{}), ContractError);
  }
}

TEST_CASE("install") {
  auto layout = testing::make_layout(2, {3}, 2);
  Rng rng(2);
  ParameterStore store = ParameterStore::initialized(layout, rng);
  ClassifierMemoryBank bank(2, layout->classifier_row_length());
  const std::vector<int> labels{0, 1};
  bank.consolidate(sensory(store, labels), count_labels(labels), 1.0, rng);
  const std::vector<double> before(store.values().begin(), store.values().end());
  bank.install(store);
  const std::vector<double> once(store.values().begin(), store.values().end());
  bank.install(store);
  CHECK(std::vector<double>(store.values().begin(), store.values().end()) == once);

  const std::size_t head_start = layout->weight_offset(1);
  for (std::size_t i = 0; i < head_start; ++i) CHECK(once[i] == before[i]);
  for (std::size_t j = 0; j < 2; ++j) CHECK(store.classifier_row(j) == row_of(bank.long_term(j)));
}

TEST_CASE("matches a direct transliteration over a long stream") {
  const std::size_t classes = 6;
  auto layout = testing::make_layout(3, {5}, classes);
  Rng rng(21);
  ParameterStore store = ParameterStore::initialized(layout, rng);
  ClassifierMemoryBank bank(classes, layout->classifier_row_length());
  oracle::DcwrTransliteration ref(classes, layout->classifier_row_length());
  const double p = 0.7;
  for (int step = 0; step < 500; ++step) {
    // Perturb the head as an optimizer would.
    for (std::size_t j = 0; j < classes; ++j) {
      auto r = store.classifier_row(j);
      for (double& v : r) v += 0.1 * (unit_uniform(rng) - 0.5);
      store.set_classifier_row(j, r);
    }
    std::vector<int> labels;
    for (std::size_t n = 1 + uniform_index(rng, 8); n > 0; --n) labels.push_back(static_cast<int>(uniform_index(rng, classes)));
    const auto counts = count_labels(labels);
    std::vector<double> eps;
    for (std::size_t e = 0; e < counts.size(); ++e) eps.push_back(unit_uniform(rng));

    std::vector<std::vector<double>> omega;
    for (std::size_t j = 0; j < classes; ++j) omega.push_back(store.classifier_row(j));
    const auto expected = ref.step(omega, labels, p, eps);

    bank.consolidate(sensory(store, labels), counts, p, eps);
    bank.install(store);
    bool same = true;
    for (std::size_t j = 0; j < classes; ++j) {
      const auto got = store.classifier_row(j);
      same = same && std::memcmp(got.data(), expected[j].data(), got.size() * sizeof(double)) == 0;
    }
    REQUIRE_MESSAGE(same, "diverged at step " << step);
  }
}
