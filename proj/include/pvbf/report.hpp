// SPDX-License-Identifier: Apache-2.0
#pragma once

// On-disk artifacts of a run directory:
//
//   acc_matrix_seed<s>.csv   task,after_task_1..after_task_K (blank = not evaluated)
//   variation_task<k>.csv    layer_id,mean_rel_change  (mean over seeds)
//   histogram_task<k>.csv    bin_lo,bin_hi,count       (summed over seeds)
//   summary.json             method, ACC/FR mean and CI, config echo, per-seed values
//   snapshots/seed<s>/theta_task<k>.csv   (save_snapshots = true)
//
// theta_task0 is the initial network; theta_task<k> is the network when
// task k closed.

#include <filesystem>
#include <string>
#include <vector>

#include "pvbf/harness.hpp"
#include <json.hpp>

namespace pvbf {

void write_acc_matrix_csv(const AccuracyMatrix& matrix, const std::filesystem::path& path);
void write_variation_csv(const std::vector<LayerProfileEntry>& profile, const std::filesystem::path& path);
void write_histogram_csv(const Histogram& hist, const std::filesystem::path& path);

/// Snapshot as `index,layer_id,kind,value` rows.
void write_snapshot_csv(const Snapshot& snap, const std::filesystem::path& path);

struct LoadedSnapshot {
  std::vector<double> values;
  std::vector<int> layer_ids;
  std::vector<ParamKind> kinds;
};
LoadedSnapshot read_snapshot_csv(const std::filesystem::path& path);

nlohmann::json summary_json(const RunReport& report);

/// Writes all run artifacts into config.output_dir.
void write_run_outputs(const RunReport& report);
void write_run_outputs(const RunReport& report, const std::filesystem::path& dir);

struct AnalyzeOptions {
  Standardizer standardizer = Standardizer::kRR;
  std::filesystem::path out_dir;  // defaults to the snapshot directory
};

/// Reads theta_task*.csv from `dir` and writes variation/histogram CSVs for
/// each consecutive pair. Returns the records, in task order.
std::vector<VariationRecord> analyze_snapshots(const std::filesystem::path& dir, const AnalyzeOptions& options);

struct SweepSpec {
  std::string key;
  std::vector<std::string> values;
};

/// Parses `key=v1,v2,...`.
SweepSpec parse_vary(std::string_view text);

/// One run per value, each written to <output_dir>/<key>-<value>/, plus a
/// sweep.json index in output_dir.
std::vector<RunReport> run_sweep(const ExperimentConfig& base, const SweepSpec& spec);

/// Collects summary.json files at `dir` or one level below it.
std::vector<nlohmann::json> collect_summaries(const std::filesystem::path& dir);

/// Human-readable table of summaries.
std::string format_report(const std::vector<nlohmann::json>& summaries);

}  // namespace pvbf
