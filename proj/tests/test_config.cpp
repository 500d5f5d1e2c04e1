// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "pvbf/config.hpp"
#include "pvbf/errors.hpp"

using namespace pvbf;

TEST_CASE("defaults are valid") { CHECK_NOTHROW(validate(ExperimentConfig{})); }

TEST_CASE("parse_config") {
  const auto c = parse_config(R"(
# comment line
method = ER-ACE
lr = 0.05   # trailing comment
hidden = 16,8
seeds = 3..6
standardizer = RS
replay_batch_size = 4
dcwr_frequency = per-task
)");
  CHECK(c.method == Method::kERACE);
  CHECK(c.lr == 0.05);
  CHECK(c.hidden == std::vector<std::size_t>{16, 8});
  CHECK(c.seeds == std::vector<std::uint64_t>{3, 4, 5, 6});
  CHECK(c.standardizer == Standardizer::kRS);
  CHECK(c.effective_replay_batch() == 4);
  CHECK(c.dcwr_frequency == DcwrFrequency::kPerTask);

  CHECK(parse_config("hidden = none").hidden.empty());
  CHECK(parse_config("seeds = 1,5,9").seeds == std::vector<std::uint64_t>{1, 5, 9});
}

TEST_CASE("configuration errors") {
  CHECK_THROWS_AS(parse_config("no_such_key = 1"), ConfigError);
  CHECK_THROWS_AS(parse_config("lr = fast"), ConfigError);
  CHECK_THROWS_AS(parse_config("lr 0.1"), ConfigError);
  CHECK_THROWS_AS(parse_config("alpha = 0"), ConfigError);
  CHECK_THROWS_AS(parse_config("alpha = 3\nbeta = 2"), ConfigError);
  CHECK_THROWS_AS(parse_config("p = 1.5"), ConfigError);
  CHECK_THROWS_AS(parse_config("num_tasks = 6"), ConfigError);
  CHECK_THROWS_AS(parse_config("method = SGD"), ConfigError);
  CHECK_THROWS_AS(parse_config("dataset = idx"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/pvbf.conf"), ConfigError);
}

TEST_CASE("config_entries read back to the same configuration") {
  ExperimentConfig c;
  c.lr = 0.1 + 0.2;
  c.method = Method::kPVBFNoDCWR;
  c.seeds = {2, 7};
  c.hidden = {5};
  std::string text;
  for (const auto& [k, v] : config_entries(c)) {
    if (!v.empty()) text += k + " = " + v + "\n";
  }
  const auto back = parse_config(text);
  CHECK(back.lr == c.lr);
  CHECK(back.method == c.method);
  CHECK(back.seeds == c.seeds);
  CHECK(back.hidden == c.hidden);
  CHECK(config_entries(back) == config_entries(c));
}

TEST_CASE("format_double round-trips") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(std::stod(format_double(0.1 + 0.2)) == 0.1 + 0.2);
}
