// SPDX-License-Identifier: Apache-2.0
// Command-line driver: run, sweep, analyze, report.
//
// Exit codes: 0 success, 1 configuration error, 2 runtime error.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "pvbf/config.hpp"
#include "pvbf/errors.hpp"
#include "pvbf/harness.hpp"
#include "pvbf/report.hpp"
#include "pvbf/simd.hpp"

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

void print_run(const pvbf::RunReport& r) {
  std::printf("%-12s ACC %.2f%%", std::string(to_string(r.config.method)).c_str(), 100.0 * r.acc_mean);
  if (r.acc_ci) std::printf(" +- %.2f", 100.0 * r.acc_ci->half_width);
  std::printf("  FR %.2f%%", 100.0 * r.fr_mean);
  if (r.fr_ci) std::printf(" +- %.2f", 100.0 * r.fr_ci->half_width);
  std::size_t failed = 0;
  for (const auto& s : r.seeds) {
    if (!s.ok) {
      ++failed;
      std::fprintf(stderr, "seed %llu failed: %s\n", static_cast<unsigned long long>(s.seed), s.error.c_str());
    }
  }
  std::printf("  (%zu seeds, %zu failed, %.2fs) -> %s\n", r.seeds.size(), failed, r.wall_seconds,
              r.config.output_dir.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online continual learning lab: ER, ER-ACE and parameter-variation balancing"};
  app.require_subcommand(1);
  std::string simd = "auto";
  app.add_option("--simd", simd, "Kernel variant: auto, scalar, avx2, neon");

  std::string config_path;
  std::size_t jobs = 0;
  auto* run = app.add_subcommand("run", "Run every seed of one configuration");
  run->add_option("--config", config_path, "Config file (key = value)")->required();
  run->add_option("--jobs", jobs, "Seeds to run in parallel (overrides config)");

  std::string vary;
  auto* sweep = app.add_subcommand("sweep", "Run one configuration per value of a key");
  sweep->add_option("--config", config_path, "Base config file")->required();
  sweep->add_option("--vary", vary, "key=v1,v2,...")->required();
  sweep->add_option("--jobs", jobs, "Seeds to run in parallel (overrides config)");

  std::string snapshots_dir;
  std::string standardizer = "RR";
  std::string out_dir;
  auto* analyze = app.add_subcommand("analyze", "Parameter-variation analysis of saved snapshots");
  analyze->add_option("--snapshots", snapshots_dir, "Directory with theta_task<k>.csv files")->required();
  analyze->add_option("--standardizer", standardizer, "RR, ZS or RS");
  analyze->add_option("--out", out_dir, "Output directory (default: the snapshot directory)");

  std::string report_dir;
  auto* report = app.add_subcommand("report", "Summarize run directories");
  report->add_option("--dir", report_dir, "Run or sweep directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (!pvbf::simd::select_kernels(simd)) {
      std::cerr << "error: kernel variant '" << simd << "' is not available\n";
      return kExitConfig;
    }
    if (*run || *sweep) {
      pvbf::ExperimentConfig config = pvbf::load_config(config_path);
      if (jobs > 0) config.jobs = jobs;
      if (*run) {
        const auto r = pvbf::run_experiment(config);
        pvbf::write_run_outputs(r);
        print_run(r);
      } else {
        for (const auto& r : pvbf::run_sweep(config, pvbf::parse_vary(vary))) print_run(r);
      }
    } else if (*analyze) {
      const auto method = pvbf::parse_standardizer(standardizer);
      if (!method) throw pvbf::ConfigError("unknown standardizer '" + standardizer + "'");
      pvbf::AnalyzeOptions opts{*method, out_dir};
      for (const auto& rec : pvbf::analyze_snapshots(snapshots_dir, opts)) {
        const auto rr = pvbf::standardize(rec.deltas, pvbf::Standardizer::kRR);
        std::printf("task %d: %zu parameters, %.1f%% moved less than the mean\n", rec.task_k, rec.deltas.size(),
                    100.0 * pvbf::fraction_below(rr, 1.0));
      }
    } else if (*report) {
      const auto summaries = pvbf::collect_summaries(report_dir);
      if (summaries.empty()) throw std::runtime_error("no summary.json found under " + report_dir);
      std::cout << pvbf::format_report(summaries);
    }
  } catch (const pvbf::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
