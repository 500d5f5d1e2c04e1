// SPDX-License-Identifier: Apache-2.0
#include "pvbf/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <regex>
#include <sstream>

#include "pvbf/errors.hpp"

namespace pvbf {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::string bound_text(double v) {
  if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
  return format_double(v);
}

}  // namespace

void write_acc_matrix_csv(const AccuracyMatrix& matrix, const fs::path& path) {
  auto out = open_out(path);
  const std::size_t k = matrix.num_tasks();
  out << "task";
  for (std::size_t j = 0; j < k; ++j) out << ",after_task_" << j + 1;
  out << '\n';
  for (std::size_t i = 0; i < k; ++i) {
    out << i + 1;
    for (std::size_t j = 0; j < k; ++j) {
      out << ',';
      if (matrix.has(i, j)) out << format_double(matrix.at(i, j));
    }
    out << '\n';
  }
}

void write_variation_csv(const std::vector<LayerProfileEntry>& profile, const fs::path& path) {
  auto out = open_out(path);
  out << "layer_id,mean_rel_change\n";
  for (const auto& e : profile) out << e.layer_id << ',' << format_double(e.mean_rel_change) << '\n';
}

void write_histogram_csv(const Histogram& hist, const fs::path& path) {
  auto out = open_out(path);
  out << "bin_lo,bin_hi,count\n";
  const double inf = std::numeric_limits<double>::infinity();
  for (std::size_t b = 0; b < hist.counts.size(); ++b) {
    const double lo = b == 0 ? -inf : hist.edges[b - 1];
    const double hi = b == hist.edges.size() ? inf : hist.edges[b];
    out << bound_text(lo) << ',' << bound_text(hi) << ',' << hist.counts[b] << '\n';
  }
}

void write_snapshot_csv(const Snapshot& snap, const fs::path& path) {
  auto out = open_out(path);
  out << "index,layer_id,kind,value\n";
  const auto values = snap.values();
  for (const LayerRange& range : snap.layout_ptr()->layer_map()) {
    const char* kind = range.kind == ParamKind::kDenseWeight ? "weight" : "bias";
    for (std::size_t i = 0; i < range.length; ++i) {
      const std::size_t m = range.start + i;
      out << m << ',' << range.layer_id << ',' << kind << ',' << format_double(values[m]) << '\n';
    }
  }
}

LoadedSnapshot read_snapshot_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open snapshot " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "index,layer_id,kind,value") {
    throw FormatError(path.string() + ": missing snapshot header");
  }
  LoadedSnapshot snap;
  std::size_t expected = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string idx, layer, kind, value;
    if (!std::getline(row, idx, ',') || !std::getline(row, layer, ',') || !std::getline(row, kind, ',') ||
        !std::getline(row, value)) {
      throw FormatError(path.string() + ": malformed row '" + line + "'");
    }
    try {
      if (std::stoull(idx) != expected++) throw FormatError(path.string() + ": indices must be 0..M-1 in order");
      snap.layer_ids.push_back(std::stoi(layer));
      snap.values.push_back(std::stod(value));
    } catch (const std::logic_error&) {
      throw FormatError(path.string() + ": malformed number in '" + line + "'");
    }
    if (kind == "weight") {
      snap.kinds.push_back(ParamKind::kDenseWeight);
    } else if (kind == "bias") {
      snap.kinds.push_back(ParamKind::kDenseBias);
    } else {
      throw FormatError(path.string() + ": unknown parameter kind '" + kind + "'");
    }
  }
  if (snap.values.empty()) throw FormatError(path.string() + ": snapshot has no parameters");
  return snap;
}

json summary_json(const RunReport& report) {
  auto ci_json = [](double mean, const std::optional<ConfidenceInterval>& ci) {
    json j;
    j["mean"] = mean;
    j["ci95"] = ci ? json(ci->half_width) : json(nullptr);
    return j;
  };
  json j;
  j["method"] = std::string(to_string(report.config.method));
  j["standardizer"] = std::string(to_string(report.config.standardizer));
  j["acc"] = ci_json(report.acc_mean, report.acc_ci);
  j["fr"] = ci_json(report.fr_mean, report.fr_ci);
  json cfg = json::object();
  for (const auto& [key, value] : config_entries(report.config)) cfg[key] = value;
  j["config"] = cfg;
  json seeds = json::array();
  for (const auto& s : report.seeds) {
    json e;
    e["seed"] = s.seed;
    e["ok"] = s.ok;
    if (!s.ok) {
      e["error"] = s.error;
      seeds.push_back(e);
      continue;
    }
    e["acc"] = s.acc;
    e["fr"] = s.fr;
    json diag = json::array();
    for (const auto& d : s.diagnostics) {
      diag.push_back({{"task", d.task_k},
                      {"below_mean_fraction", d.below_mean_fraction},
                      {"output_layer_mean_rr", d.output_layer_mean_rr},
                      {"hidden_layers_mean_rr", d.hidden_layers_mean_rr},
                      {"output_layer_dominates", d.output_layer_dominates}});
    }
    e["transitions"] = diag;
    seeds.push_back(e);
  }
  j["per_seed"] = seeds;
  return j;
}

void write_run_outputs(const RunReport& report) { write_run_outputs(report, report.config.output_dir); }

void write_run_outputs(const RunReport& report, const fs::path& dir) {
  fs::create_directories(dir);
  const auto edges = default_histogram_edges();
  std::map<int, std::vector<double>> profile_sums;
  std::map<int, std::vector<std::size_t>> hist_sums;
  std::map<int, int> profile_counts;

  for (const auto& s : report.seeds) {
    if (!s.ok) continue;
    write_acc_matrix_csv(s.matrix, dir / ("acc_matrix_seed" + std::to_string(s.seed) + ".csv"));
    for (const auto& rec : s.records) {
      const auto profile = layer_profile(rec.rel_changes, *report.layout);
      auto& sums = profile_sums[rec.task_k];
      sums.resize(profile.size(), 0.0);
      for (std::size_t l = 0; l < profile.size(); ++l) sums[l] += profile[l].mean_rel_change;
      ++profile_counts[rec.task_k];
      const Histogram h = histogram(rec.rel_changes, edges);
      auto& hs = hist_sums[rec.task_k];
      hs.resize(h.counts.size(), 0);
      for (std::size_t b = 0; b < h.counts.size(); ++b) hs[b] += h.counts[b];
    }
    if (report.config.save_snapshots) {
      const fs::path snap_dir = dir / "snapshots" / ("seed" + std::to_string(s.seed));
      for (std::size_t k = 0; k < s.snapshots.size(); ++k) {
        write_snapshot_csv(s.snapshots[k], snap_dir / ("theta_task" + std::to_string(k) + ".csv"));
      }
    }
  }

  for (auto& [task, sums] : profile_sums) {
    std::vector<LayerProfileEntry> profile;
    for (std::size_t l = 0; l < sums.size(); ++l) {
      profile.push_back({static_cast<int>(l), 0, sums[l] / profile_counts[task],
                         static_cast<int>(l) == report.layout->output_layer_id()});
    }
    write_variation_csv(profile, dir / ("variation_task" + std::to_string(task) + ".csv"));
    write_histogram_csv(Histogram{edges, hist_sums[task]}, dir / ("histogram_task" + std::to_string(task) + ".csv"));
  }

  auto out = open_out(dir / "summary.json");
  out << summary_json(report).dump(2) << '\n';
}

std::vector<VariationRecord> analyze_snapshots(const fs::path& dir, const AnalyzeOptions& options) {
  if (!fs::is_directory(dir)) throw std::runtime_error("snapshot directory " + dir.string() + " does not exist");
  std::map<int, fs::path> files;
  const std::regex pattern(R"(theta_task(\d+)\.csv)");
  for (const auto& entry : fs::directory_iterator(dir)) {
    std::smatch m;
    const std::string name = entry.path().filename().string();
    if (std::regex_match(name, m, pattern)) files[std::stoi(m[1])] = entry.path();
  }
  if (files.size() < 2) throw FormatError(dir.string() + ": need at least two theta_task<k>.csv snapshots");

  const fs::path out_dir = options.out_dir.empty() ? dir : options.out_dir;
  std::vector<VariationRecord> records;
  std::optional<LoadedSnapshot> prev;
  for (const auto& [k, path] : files) {
    LoadedSnapshot curr = read_snapshot_csv(path);
    if (prev) {
      if (prev->layer_ids != curr.layer_ids) throw ConsistencyError(path.string() + ": layer map differs from previous");
      VariationRecord rec;
      rec.task_k = k;
      rec.method = options.standardizer;
      rec.deltas = compute_deltas(prev->values, curr.values);
      rec.rel_changes = standardize(rec.deltas, options.standardizer);

      std::map<int, std::pair<double, std::size_t>> per_layer;
      for (std::size_t m = 0; m < rec.rel_changes.size(); ++m) {
        auto& acc = per_layer[curr.layer_ids[m]];
        acc.first += rec.rel_changes[m];
        ++acc.second;
      }
      std::vector<LayerProfileEntry> profile;
      for (const auto& [layer, acc] : per_layer) {
        profile.push_back({layer, acc.second, acc.first / static_cast<double>(acc.second),
                           layer == per_layer.rbegin()->first});
      }
      write_variation_csv(profile, out_dir / ("variation_task" + std::to_string(k) + ".csv"));
      write_histogram_csv(histogram(rec.rel_changes, default_histogram_edges()),
                          out_dir / ("histogram_task" + std::to_string(k) + ".csv"));
      records.push_back(std::move(rec));
    }
    prev = std::move(curr);
  }
  return records;
}

SweepSpec parse_vary(std::string_view text) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos || eq == 0 || eq + 1 == text.size()) {
    throw ConfigError("--vary expects key=v1,v2,...");
  }
  SweepSpec spec;
  spec.key = std::string(text.substr(0, eq));
  std::string_view rest = text.substr(eq + 1);
  while (true) {
    const auto comma = rest.find(',');
    const std::string_view v = rest.substr(0, comma);
    if (v.empty()) throw ConfigError("--vary has an empty value");
    spec.values.emplace_back(v);
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  return spec;
}

std::vector<RunReport> run_sweep(const ExperimentConfig& base, const SweepSpec& spec) {
  if (spec.key == "output_dir" || spec.key == "seeds") {
    throw ConfigError("cannot sweep over '" + spec.key + "'");
  }
  std::vector<ExperimentConfig> configs;
  for (const auto& value : spec.values) {
    ExperimentConfig cfg = base;
    apply_setting(cfg, spec.key, value);
    cfg.output_dir = (fs::path(base.output_dir) / (spec.key + "-" + value)).string();
    validate(cfg);
    configs.push_back(std::move(cfg));
  }
  std::vector<RunReport> reports;
  json index;
  index["key"] = spec.key;
  index["runs"] = json::array();
  for (const auto& cfg : configs) {
    reports.push_back(run_experiment(cfg));
    write_run_outputs(reports.back());
    const auto entries = config_entries(cfg);
    const auto it = std::find_if(entries.begin(), entries.end(), [&](const auto& e) { return e.first == spec.key; });
    index["runs"].push_back({{"value", it->second},
                             {"dir", fs::path(cfg.output_dir).filename().string()},
                             {"acc", reports.back().acc_mean},
                             {"fr", reports.back().fr_mean}});
  }
  auto out = open_out(fs::path(base.output_dir) / "sweep.json");
  out << index.dump(2) << '\n';
  return reports;
}

std::vector<json> collect_summaries(const fs::path& dir) {
  std::vector<fs::path> paths;
  if (fs::exists(dir / "summary.json")) paths.push_back(dir / "summary.json");
  if (fs::is_directory(dir)) {
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.is_directory() && fs::exists(entry.path() / "summary.json")) {
        paths.push_back(entry.path() / "summary.json");
      }
    }
  }
  std::sort(paths.begin(), paths.end());
  std::vector<json> out;
  for (const auto& p : paths) {
    std::ifstream in(p);
    try {
      json j = json::parse(in);
      j["path"] = p.parent_path().string();
      out.push_back(std::move(j));
    } catch (const json::exception& e) {
      throw FormatError(p.string() + ": " + e.what());
    }
  }
  return out;
}

std::string format_report(const std::vector<json>& summaries) {
  std::ostringstream os;
  os << std::left << std::setw(40) << "run" << std::setw(14) << "method" << std::setw(6) << "std"
     << std::setw(20) << "ACC (%)" << std::setw(20) << "FR (%)" << "seeds\n";
  auto cell = [](const json& m) {
    std::ostringstream c;
    c << std::fixed << std::setprecision(1) << 100.0 * m.at("mean").get<double>();
    if (!m.at("ci95").is_null()) c << " +- " << 100.0 * m.at("ci95").get<double>();
    return c.str();
  };
  for (const auto& s : summaries) {
    std::size_t ok = 0;
    for (const auto& seed : s.at("per_seed")) ok += seed.at("ok").get<bool>() ? 1 : 0;
    os << std::setw(40) << s.value("path", std::string("?")) << std::setw(14) << s.at("method").get<std::string>()
       << std::setw(6) << s.value("standardizer", std::string("?")) << std::setw(20) << cell(s.at("acc"))
       << std::setw(20) << cell(s.at("fr")) << ok << '/' << s.at("per_seed").size() << '\n';
  }
  return os.str();
}

}  // namespace pvbf
