// SPDX-License-Identifier: Apache-2.0
#pragma once

// Experiment configuration and its flat `key = value` text format.
//
//   # comment
//   method = PVBF
//   seeds = 1..15
//
// Unknown keys, malformed values and violated invariants raise ConfigError.
// See README.md for the key reference.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pvbf/nncore.hpp"
#include "pvbf/paramvar.hpp"

namespace pvbf {

enum class Method { kER, kERACE, kPVBF, kPVBFNoDCWR };
enum class DcwrFrequency { kPerBatch, kPerTask };
/// Where consolidated classifier rows go: a separate prediction head
/// (training continues on the SGD rows) or back into the trained rows.
enum class DcwrTarget { kPredict, kTrain };

std::string_view to_string(Method m);
std::string_view to_string(DcwrFrequency f);
std::string_view to_string(DcwrTarget t);

struct ExperimentConfig {
  // Data.
  std::string dataset = "blobs";  // "blobs" or "idx"
  std::size_t num_classes = 10;
  std::size_t input_dim = 20;
  std::size_t per_class = 100;
  double spread = 1.0;
  std::uint64_t data_seed = 0;
  std::string idx_images;
  std::string idx_labels;
  std::string idx_test_images;
  std::string idx_test_labels;

  // Stream.
  std::size_t num_tasks = 5;
  std::size_t classes_per_task = 2;
  std::size_t batch_size = 10;
  std::optional<std::size_t> replay_batch_size;  // defaults to batch_size
  bool shuffle_task_order = false;

  // Network.
  std::vector<std::size_t> hidden{64, 32};
  Activation activation = Activation::kRelu;

  // Learning.
  Method method = Method::kPVBF;
  std::size_t buffer_capacity = 50;
  double lr = 0.1;
  double alpha = 0.5;
  double beta = 2.0;
  double p = 0.9;
  Standardizer standardizer = Standardizer::kRR;
  DcwrFrequency dcwr_frequency = DcwrFrequency::kPerBatch;
  DcwrTarget dcwr_target = DcwrTarget::kPredict;

  // Execution.
  std::vector<std::uint64_t> seeds{1};
  std::string output_dir = "runs/default";
  bool save_snapshots = false;
  std::size_t jobs = 1;

  std::size_t effective_replay_batch() const { return replay_batch_size.value_or(batch_size); }
};

/// Sets one key from its text form.
void apply_setting(ExperimentConfig& config, std::string_view key, std::string_view value);

/// Throws ConfigError if the invariants (0 < alpha <= beta, 0 <= p <= 1, ...) fail.
void validate(const ExperimentConfig& config);

ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Every key with its canonical text value, in documentation order.
std::vector<std::pair<std::string, std::string>> config_entries(const ExperimentConfig& config);

/// Shortest text that reads back to the same double.
std::string format_double(double v);

}  // namespace pvbf
