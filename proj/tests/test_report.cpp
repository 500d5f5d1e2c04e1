// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "pvbf/config.hpp"
#include "pvbf/errors.hpp"
#include "pvbf/harness.hpp"
#include "pvbf/report.hpp"
#include "test_support.hpp"

using namespace pvbf;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig tiny_config(const fs::path& out) {
  ExperimentConfig c;
  c.num_classes = 4;
  c.input_dim = 3;
  c.per_class = 20;
  c.num_tasks = 2;
  c.batch_size = 5;
  c.hidden = {6};
  c.buffer_capacity = 10;
  c.seeds = {1, 2};
  c.output_dir = out.string();
  return c;
}

}  // namespace

TEST_CASE("accuracy matrix csv leaves unevaluated cells blank") {
  const fs::path dir = fresh_dir("pvbf_report_acc");
  AccuracyMatrix m(2);
  m.set(0, 0, 0.5);
  m.set(0, 1, 0.25);
  m.set(1, 1, 1.0);
  write_acc_matrix_csv(m, dir / "m.csv");
  CHECK(slurp(dir / "m.csv") == "task,after_task_1,after_task_2\n1,0.5,0.25\n2,,1\n");
}

TEST_CASE("histogram csv") {
  const fs::path dir = fresh_dir("pvbf_report_hist");
  const std::vector<double> v{0.5, 1.5, 3.0};
  write_histogram_csv(histogram(v, std::vector<double>{1.0, 2.0}), dir / "h.csv");
  CHECK(slurp(dir / "h.csv") == "bin_lo,bin_hi,count\n-inf,1,1\n1,2,1\n2,inf,1\n");
}

TEST_CASE("snapshot csv round-trip") {
  const fs::path dir = fresh_dir("pvbf_report_snap");
  auto layout = testing::make_layout(3, {4}, 2);
  Rng rng(3);
  const ParameterStore store = ParameterStore::initialized(layout, rng);
  write_snapshot_csv(snapshot(store), dir / "s.csv");
  const LoadedSnapshot back = read_snapshot_csv(dir / "s.csv");
  CHECK(back.values == std::vector<double>(store.values().begin(), store.values().end()));
  CHECK(back.layer_ids.front() == 0);
  CHECK(back.layer_ids.back() == 1);
  CHECK(back.kinds.back() == ParamKind::kDenseBias);

  std::ofstream(dir / "bad.csv") << "index,layer_id,kind,value\n0,0,weight\n";
  CHECK_THROWS_AS(read_snapshot_csv(dir / "bad.csv"), FormatError);
}

TEST_CASE("offline analysis reproduces the online records") {
  const fs::path dir = fresh_dir("pvbf_report_analyze");
  ExperimentConfig c = tiny_config(dir / "run");
  c.seeds = {4};
  c.save_snapshots = true;
  c.standardizer = Standardizer::kZS;
  const RunReport rep = run_experiment(c);
  write_run_outputs(rep);
  AnalyzeOptions opts;
  opts.standardizer = Standardizer::kZS;
  opts.out_dir = dir / "analysis";
  const auto records = analyze_snapshots(dir / "run" / "snapshots" / "seed4", opts);
  REQUIRE(records.size() == rep.seeds[0].records.size());
  for (std::size_t k = 0; k < records.size(); ++k) {
    CHECK(records[k].task_k == rep.seeds[0].records[k].task_k);
    CHECK(records[k].deltas == rep.seeds[0].records[k].deltas);
    CHECK(records[k].rel_changes == rep.seeds[0].records[k].rel_changes);
  }
  CHECK(fs::exists(dir / "analysis" / "variation_task1.csv"));
  CHECK(fs::exists(dir / "analysis" / "histogram_task2.csv"));
}

TEST_CASE("summary json") {
  const fs::path dir = fresh_dir("pvbf_report_summary");
  const RunReport rep = run_experiment(tiny_config(dir));
  const auto j = summary_json(rep);
  CHECK(j["method"] == "PVBF");
  CHECK(j["per_seed"].size() == 2);
  CHECK(j["acc"]["mean"].get<double>() == rep.acc_mean);
  CHECK(j["config"]["lr"] == "0.1");
  CHECK(j["per_seed"][0]["transitions"].size() == 2);
}

TEST_CASE("sweep") {
  const fs::path dir = fresh_dir("pvbf_report_sweep");
  const SweepSpec spec = parse_vary("standardizer=RR,ZS,RS");
  CHECK(spec.key == "standardizer");
  CHECK(spec.values == std::vector<std::string>{"RR", "ZS", "RS"});
  CHECK_THROWS_AS(parse_vary("standardizer"), ConfigError);

  const auto reports = run_sweep(tiny_config(dir), spec);
  REQUIRE(reports.size() == 3);
  CHECK(reports[2].config.standardizer == Standardizer::kRS);
  CHECK(fs::exists(dir / "standardizer-ZS" / "summary.json"));
  CHECK(fs::exists(dir / "sweep.json"));
  const auto summaries = collect_summaries(dir);
  CHECK(summaries.size() == 3);
  const std::string table = format_report(summaries);
  CHECK(table.find("RS") != std::string::npos);

  CHECK_THROWS_AS(run_sweep(tiny_config(dir), parse_vary("seeds=1,2")), ConfigError);
  CHECK_THROWS_AS(run_sweep(tiny_config(dir), parse_vary("alpha=0.5,nope")), ConfigError);
}
