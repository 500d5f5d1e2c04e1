// SPDX-License-Identifier: Apache-2.0
#include "pvbf/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "pvbf/errors.hpp"

namespace pvbf {

std::string_view to_string(Method m) {
  switch (m) {
    case Method::kER: return "ER";
    case Method::kERACE: return "ER-ACE";
    case Method::kPVBF: return "PVBF";
    case Method::kPVBFNoDCWR: return "PVBF-noDCWR";
  }
  return "?";
}

std::string_view to_string(DcwrFrequency f) {
  return f == DcwrFrequency::kPerBatch ? "per-batch" : "per-task";
}

std::string_view to_string(DcwrTarget t) { return t == DcwrTarget::kPredict ? "predict" : "train"; }

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view expected) {
  throw ConfigError("invalid value '" + std::string(value) + "' for key '" + std::string(key) + "' (expected " +
                    std::string(expected) + ")");
}

std::uint64_t parse_uint(std::string_view key, std::string_view value) {
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size() || value.empty()) {
    bad_value(key, value, "a non-negative integer");
  }
  return out;
}

double parse_real(std::string_view key, std::string_view value) {
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size() || value.empty() || !std::isfinite(out)) {
    bad_value(key, value, "a finite real number");
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  bad_value(key, value, "true or false");
}

std::vector<std::uint64_t> parse_seeds(std::string_view key, std::string_view value) {
  std::vector<std::uint64_t> seeds;
  for (std::string_view part : split(value, ',')) {
    const auto dots = part.find("..");
    if (dots == std::string_view::npos) {
      seeds.push_back(parse_uint(key, part));
      continue;
    }
    const std::uint64_t lo = parse_uint(key, trim(part.substr(0, dots)));
    const std::uint64_t hi = parse_uint(key, trim(part.substr(dots + 2)));
    if (hi < lo) bad_value(key, value, "an ascending range lo..hi");
    for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
  }
  return seeds;
}

std::vector<std::size_t> parse_widths(std::string_view key, std::string_view value) {
  std::vector<std::size_t> widths;
  if (value.empty() || value == "none") return widths;
  for (std::string_view part : split(value, ',')) widths.push_back(parse_uint(key, part));
  return widths;
}

using Setter = std::function<void(ExperimentConfig&, std::string_view, std::string_view)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = {
      {"dataset",
       [](auto& c, auto k, auto v) {
         if (v != "blobs" && v != "idx") bad_value(k, v, "blobs or idx");
         c.dataset = std::string(v);
       }},
      {"num_classes", [](auto& c, auto k, auto v) { c.num_classes = parse_uint(k, v); }},
      {"input_dim", [](auto& c, auto k, auto v) { c.input_dim = parse_uint(k, v); }},
      {"per_class", [](auto& c, auto k, auto v) { c.per_class = parse_uint(k, v); }},
      {"spread", [](auto& c, auto k, auto v) { c.spread = parse_real(k, v); }},
      {"data_seed", [](auto& c, auto k, auto v) { c.data_seed = parse_uint(k, v); }},
      {"idx_images", [](auto& c, auto, auto v) { c.idx_images = std::string(v); }},
      {"idx_labels", [](auto& c, auto, auto v) { c.idx_labels = std::string(v); }},
      {"idx_test_images", [](auto& c, auto, auto v) { c.idx_test_images = std::string(v); }},
      {"idx_test_labels", [](auto& c, auto, auto v) { c.idx_test_labels = std::string(v); }},
      {"num_tasks", [](auto& c, auto k, auto v) { c.num_tasks = parse_uint(k, v); }},
      {"classes_per_task", [](auto& c, auto k, auto v) { c.classes_per_task = parse_uint(k, v); }},
      {"batch_size", [](auto& c, auto k, auto v) { c.batch_size = parse_uint(k, v); }},
      {"replay_batch_size",
       [](auto& c, auto k, auto v) {
         if (v == "auto") {
           c.replay_batch_size.reset();
         } else {
           c.replay_batch_size = parse_uint(k, v);
         }
       }},
      {"shuffle_task_order", [](auto& c, auto k, auto v) { c.shuffle_task_order = parse_bool(k, v); }},
      {"hidden", [](auto& c, auto k, auto v) { c.hidden = parse_widths(k, v); }},
      {"activation",
       [](auto& c, auto k, auto v) {
         if (v == "relu") {
           c.activation = Activation::kRelu;
         } else if (v == "tanh") {
           c.activation = Activation::kTanh;
         } else {
           bad_value(k, v, "relu or tanh");
         }
       }},
      {"method",
       [](auto& c, auto k, auto v) {
         if (v == "ER") {
           c.method = Method::kER;
         } else if (v == "ER-ACE") {
           c.method = Method::kERACE;
         } else if (v == "PVBF") {
           c.method = Method::kPVBF;
         } else if (v == "PVBF-noDCWR") {
           c.method = Method::kPVBFNoDCWR;
         } else {
           bad_value(k, v, "ER, ER-ACE, PVBF or PVBF-noDCWR");
         }
       }},
      {"buffer_capacity", [](auto& c, auto k, auto v) { c.buffer_capacity = parse_uint(k, v); }},
      {"lr", [](auto& c, auto k, auto v) { c.lr = parse_real(k, v); }},
      {"alpha", [](auto& c, auto k, auto v) { c.alpha = parse_real(k, v); }},
      {"beta", [](auto& c, auto k, auto v) { c.beta = parse_real(k, v); }},
      {"p", [](auto& c, auto k, auto v) { c.p = parse_real(k, v); }},
      {"standardizer",
       [](auto& c, auto k, auto v) {
         auto s = parse_standardizer(v);
         if (!s) bad_value(k, v, "RR, ZS or RS");
         c.standardizer = *s;
       }},
      {"dcwr_frequency",
       [](auto& c, auto k, auto v) {
         if (v == "per-batch") {
           c.dcwr_frequency = DcwrFrequency::kPerBatch;
         } else if (v == "per-task") {
           c.dcwr_frequency = DcwrFrequency::kPerTask;
         } else {
           bad_value(k, v, "per-batch or per-task");
         }
       }},
      {"dcwr_target",
       [](auto& c, auto k, auto v) {
         if (v == "predict") {
           c.dcwr_target = DcwrTarget::kPredict;
         } else if (v == "train") {
           c.dcwr_target = DcwrTarget::kTrain;
         } else {
           bad_value(k, v, "predict or train");
         }
       }},
      {"seeds", [](auto& c, auto k, auto v) { c.seeds = parse_seeds(k, v); }},
      {"output_dir", [](auto& c, auto, auto v) { c.output_dir = std::string(v); }},
      {"save_snapshots", [](auto& c, auto k, auto v) { c.save_snapshots = parse_bool(k, v); }},
      {"jobs", [](auto& c, auto k, auto v) { c.jobs = parse_uint(k, v); }},
  };
  return table;
}

}  // namespace

void apply_setting(ExperimentConfig& config, std::string_view key, std::string_view value) {
  const auto& table = setters();
  const auto it = table.find(key);
  if (it == table.end()) throw ConfigError("unknown config key '" + std::string(key) + "'");
  it->second(config, key, trim(value));
}

void validate(const ExperimentConfig& c) {
  if (!(c.alpha > 0.0) || !(c.alpha <= c.beta)) throw ConfigError("config: need 0 < alpha <= beta");
  if (!(c.p >= 0.0 && c.p <= 1.0)) throw ConfigError("config: p must lie in [0, 1]");
  if (!(c.lr >= 0.0)) throw ConfigError("config: lr must be non-negative");
  if (c.seeds.empty()) throw ConfigError("config: at least one seed is required");
  if (c.batch_size == 0) throw ConfigError("config: batch_size must be positive");
  if (c.num_tasks == 0 || c.classes_per_task == 0) {
    throw ConfigError("config: num_tasks and classes_per_task must be positive");
  }
  if (c.dataset == "blobs") {
    if (c.num_classes < 2 || c.per_class < 2 || c.input_dim == 0) {
      throw ConfigError("config: blobs need num_classes >= 2, per_class >= 2, input_dim >= 1");
    }
    if (c.num_tasks * c.classes_per_task > c.num_classes) {
      throw ConfigError("config: num_tasks * classes_per_task exceeds num_classes");
    }
    if (!(c.spread >= 0.0)) throw ConfigError("config: spread must be non-negative");
  } else if (c.idx_images.empty() || c.idx_labels.empty()) {
    throw ConfigError("config: dataset = idx needs idx_images and idx_labels");
  } else if (c.idx_test_images.empty() != c.idx_test_labels.empty()) {
    throw ConfigError("config: idx_test_images and idx_test_labels must be given together");
  }
  for (std::size_t h : c.hidden) {
    if (h == 0) throw ConfigError("config: hidden widths must be positive");
  }
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig config;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = std::min(text.find('\n', start), text.size());
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    apply_setting(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  validate(config);
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::vector<std::pair<std::string, std::string>> config_entries(const ExperimentConfig& c) {
  auto join = [](const auto& values) {
    std::string out;
    for (const auto& v : values) {
      if (!out.empty()) out += ',';
      out += std::to_string(v);
    }
    return out;
  };
  return {
      {"dataset", c.dataset},
      {"num_classes", std::to_string(c.num_classes)},
      {"input_dim", std::to_string(c.input_dim)},
      {"per_class", std::to_string(c.per_class)},
      {"spread", format_double(c.spread)},
      {"data_seed", std::to_string(c.data_seed)},
      {"idx_images", c.idx_images},
      {"idx_labels", c.idx_labels},
      {"idx_test_images", c.idx_test_images},
      {"idx_test_labels", c.idx_test_labels},
      {"num_tasks", std::to_string(c.num_tasks)},
      {"classes_per_task", std::to_string(c.classes_per_task)},
      {"batch_size", std::to_string(c.batch_size)},
      {"replay_batch_size", c.replay_batch_size ? std::to_string(*c.replay_batch_size) : "auto"},
      {"shuffle_task_order", c.shuffle_task_order ? "true" : "false"},
      {"hidden", c.hidden.empty() ? "none" : join(c.hidden)},
      {"activation", c.activation == Activation::kRelu ? "relu" : "tanh"},
      {"method", std::string(to_string(c.method))},
      {"buffer_capacity", std::to_string(c.buffer_capacity)},
      {"lr", format_double(c.lr)},
      {"alpha", format_double(c.alpha)},
      {"beta", format_double(c.beta)},
      {"p", format_double(c.p)},
      {"standardizer", std::string(to_string(c.standardizer))},
      {"dcwr_frequency", std::string(to_string(c.dcwr_frequency))},
      {"dcwr_target", std::string(to_string(c.dcwr_target))},
      {"seeds", join(c.seeds)},
      {"output_dir", c.output_dir},
      {"save_snapshots", c.save_snapshots ? "true" : "false"},
      {"jobs", std::to_string(c.jobs)},
  };
}

}  // namespace pvbf
