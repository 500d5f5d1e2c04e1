// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "pvbf/nncore.hpp"
#include "pvbf/rng.hpp"

namespace pvbf {

struct Dataset {
  Matrix inputs;
  std::vector<int> labels;
  std::size_t num_classes = 0;
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> test_indices;

  std::size_t size() const { return labels.size(); }
  std::size_t input_dim() const { return inputs.cols; }
  /// Rows of `indices` gathered into a batch.
  Batch gather(const std::vector<std::size_t>& indices) const;
};

/// Gaussian clusters, one per class, with means ~ N(0, 1) per coordinate.
/// Sample i of each class lands in the test split when i % 5 == 4.
Dataset gen_blobs(std::size_t num_classes, std::size_t dim, std::size_t per_class, double spread,
                  std::uint64_t seed);

/// Reads an IDX image file (magic 0x00000803) and label file (0x00000801).
/// Pixels are scaled to [0, 1]; all samples go to the train split.
Dataset load_idx(const std::filesystem::path& images_path, const std::filesystem::path& labels_path);

/// Train/test pair of IDX files merged into one dataset.
Dataset load_idx_split(const std::filesystem::path& train_images,
                       const std::filesystem::path& train_labels,
                       const std::filesystem::path& test_images,
                       const std::filesystem::path& test_labels);

/// Assigns an 80/20 train/test split by index (every fifth sample to test).
void split_by_index(Dataset& dataset);

struct StreamBatch {
  Batch batch;
  int task_id = 0;  // 1-based
  bool is_first_of_task = false;
  /// True on the first batch of every task after the first.
  bool is_boundary = false;
};

class TaskStream {
 public:
  TaskStream(std::vector<StreamBatch> batches, std::vector<std::vector<int>> task_classes,
             std::size_t batch_size)
      : batches_(std::move(batches)), task_classes_(std::move(task_classes)), batch_size_(batch_size) {}

  /// Next batch, or std::nullopt at end of stream.
  std::optional<StreamBatch> next_batch();
  void rewind() { cursor_ = 0; }

  const std::vector<StreamBatch>& batches() const { return batches_; }
  const std::vector<std::vector<int>>& task_classes() const { return task_classes_; }
  std::size_t num_tasks() const { return task_classes_.size(); }
  std::size_t batch_size() const { return batch_size_; }

 private:
  std::vector<StreamBatch> batches_;
  std::vector<std::vector<int>> task_classes_;
  std::size_t batch_size_;
  std::size_t cursor_ = 0;
};

struct StreamOptions {
  std::size_t num_tasks = 5;
  std::size_t classes_per_task = 2;
  std::size_t batch_size = 10;
  /// Permute class ids before assigning them to tasks.
  bool shuffle_task_order = false;
};

/// Disjoint-label split of the train partition. `rng` drives the optional
/// class permutation and the within-task sample shuffle.
TaskStream make_split_stream(const Dataset& dataset, const StreamOptions& options, Rng& rng);

/// Test partition restricted to each task's classes.
std::vector<Batch> task_test_sets(const Dataset& dataset, const TaskStream& stream);

}  // namespace pvbf
