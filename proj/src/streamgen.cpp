// SPDX-License-Identifier: Apache-2.0
#include "pvbf/streamgen.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <numeric>
#include <random>
#include <string>

#include "pvbf/errors.hpp"

namespace pvbf {

Batch Dataset::gather(const std::vector<std::size_t>& indices) const {
  Batch batch;
  batch.inputs = Matrix(indices.size(), input_dim());
  batch.labels.reserve(indices.size());
  for (std::size_t r = 0; r < indices.size(); ++r) {
    const auto src = inputs.row(indices[r]);
    std::copy(src.begin(), src.end(), batch.inputs.row(r).begin());
    batch.labels.push_back(labels[indices[r]]);
  }
  return batch;
}

Dataset gen_blobs(std::size_t num_classes, std::size_t dim, std::size_t per_class, double spread,
                  std::uint64_t seed) {
  if (num_classes < 2 || per_class < 2 || dim == 0) {
    throw ConfigError("gen_blobs needs num_classes >= 2, per_class >= 2 and dim >= 1");
  }
  if (!(spread >= 0.0)) throw ConfigError("gen_blobs spread must be non-negative");

  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix means(num_classes, dim);
  for (double& v : means.data) v = normal(rng);

  Dataset ds;
  ds.num_classes = num_classes;
  ds.inputs = Matrix(num_classes * per_class, dim);
  ds.labels.resize(num_classes * per_class);
  for (std::size_t c = 0; c < num_classes; ++c) {
    for (std::size_t i = 0; i < per_class; ++i) {
      const std::size_t r = c * per_class + i;
      ds.labels[r] = static_cast<int>(c);
      auto row = ds.inputs.row(r);
      for (std::size_t d = 0; d < dim; ++d) row[d] = means(c, d) + spread * normal(rng);
      (i % 5 == 4 ? ds.test_indices : ds.train_indices).push_back(r);
    }
  }
  return ds;
}

void split_by_index(Dataset& dataset) {
  dataset.train_indices.clear();
  dataset.test_indices.clear();
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    (i % 5 == 4 ? dataset.test_indices : dataset.train_indices).push_back(i);
  }
}

namespace {

std::vector<unsigned char> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint32_t read_be32(const std::vector<unsigned char>& bytes, std::size_t offset) {
  return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
         (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

struct IdxPayload {
  std::vector<std::uint32_t> dims;
  std::vector<unsigned char> bytes;
  std::size_t data_offset = 0;
  std::size_t count = 0;
  std::size_t item_size = 1;
};

IdxPayload parse_idx(const std::filesystem::path& path, std::uint32_t expected_magic) {
  IdxPayload p;
  p.bytes = read_file(path);
  if (p.bytes.size() < 4) throw FormatError(path.string() + ": file too short for IDX header");
  const std::uint32_t magic = read_be32(p.bytes, 0);
  if (magic != expected_magic) {
    throw FormatError(path.string() + ": bad IDX magic number " + std::to_string(magic));
  }
  const std::size_t ndims = magic & 0xFF;
  if (ndims == 0) throw FormatError(path.string() + ": IDX file declares no dimensions");
  if (p.bytes.size() < 4 + 4 * ndims) throw FormatError(path.string() + ": truncated IDX header");
  for (std::size_t d = 0; d < ndims; ++d) p.dims.push_back(read_be32(p.bytes, 4 + 4 * d));
  p.data_offset = 4 + 4 * ndims;
  p.count = p.dims[0];
  for (std::size_t d = 1; d < ndims; ++d) p.item_size *= p.dims[d];
  if (p.bytes.size() - p.data_offset < p.count * p.item_size) {
    throw FormatError(path.string() + ": truncated IDX payload");
  }
  return p;
}

}  // namespace

Dataset load_idx(const std::filesystem::path& images_path, const std::filesystem::path& labels_path) {
  const IdxPayload images = parse_idx(images_path, 0x00000803);
  const IdxPayload labels = parse_idx(labels_path, 0x00000801);
  if (images.count != labels.count) {
    throw ConsistencyError("image count " + std::to_string(images.count) + " does not match label count " +
                           std::to_string(labels.count));
  }
  Dataset ds;
  ds.inputs = Matrix(images.count, images.item_size);
  for (std::size_t i = 0; i < images.count * images.item_size; ++i) {
    ds.inputs.data[i] = images.bytes[images.data_offset + i] / 255.0;
  }
  ds.labels.resize(labels.count);
  int max_label = -1;
  for (std::size_t i = 0; i < labels.count; ++i) {
    ds.labels[i] = labels.bytes[labels.data_offset + i];
    max_label = std::max(max_label, ds.labels[i]);
  }
  ds.num_classes = static_cast<std::size_t>(max_label + 1);
  ds.train_indices.resize(ds.size());
  std::iota(ds.train_indices.begin(), ds.train_indices.end(), 0);
  return ds;
}

Dataset load_idx_split(const std::filesystem::path& train_images, const std::filesystem::path& train_labels,
                       const std::filesystem::path& test_images, const std::filesystem::path& test_labels) {
  Dataset train = load_idx(train_images, train_labels);
  Dataset test = load_idx(test_images, test_labels);
  if (train.input_dim() != test.input_dim()) {
    throw ConsistencyError("train and test images have different sizes");
  }
  Dataset ds;
  ds.num_classes = std::max(train.num_classes, test.num_classes);
  ds.inputs = vstack(train.inputs, test.inputs);
  ds.labels = train.labels;
  ds.labels.insert(ds.labels.end(), test.labels.begin(), test.labels.end());
  ds.train_indices = train.train_indices;
  for (std::size_t i = 0; i < test.size(); ++i) ds.test_indices.push_back(train.size() + i);
  return ds;
}

std::optional<StreamBatch> TaskStream::next_batch() {
  if (cursor_ >= batches_.size()) return std::nullopt;
  return batches_[cursor_++];
}

namespace {

std::vector<std::vector<int>> assign_classes(const Dataset& dataset, const StreamOptions& options, Rng& rng) {
  if (options.num_tasks == 0 || options.classes_per_task == 0 || options.batch_size == 0) {
    throw ConfigError("num_tasks, classes_per_task and batch_size must be positive");
  }
  if (options.num_tasks * options.classes_per_task > dataset.num_classes) {
    throw ConfigError("stream needs " + std::to_string(options.num_tasks * options.classes_per_task) +
                      " classes but the dataset has " + std::to_string(dataset.num_classes));
  }
  std::vector<int> order(dataset.num_classes);
  std::iota(order.begin(), order.end(), 0);
  if (options.shuffle_task_order) {
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[uniform_index(rng, i)]);
  }
  std::vector<std::vector<int>> tasks(options.num_tasks);
  for (std::size_t t = 0; t < options.num_tasks; ++t) {
    for (std::size_t c = 0; c < options.classes_per_task; ++c) {
      tasks[t].push_back(order[t * options.classes_per_task + c]);
    }
    std::sort(tasks[t].begin(), tasks[t].end());
  }
  return tasks;
}

}  // namespace

TaskStream make_split_stream(const Dataset& dataset, const StreamOptions& options, Rng& rng) {
  auto tasks = assign_classes(dataset, options, rng);
  std::vector<int> task_of_class(dataset.num_classes, -1);
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    for (int c : tasks[t]) task_of_class[c] = static_cast<int>(t);
  }
  std::vector<std::vector<std::size_t>> samples(tasks.size());
  for (std::size_t idx : dataset.train_indices) {
    const int t = task_of_class.at(dataset.labels[idx]);
    if (t >= 0) samples[t].push_back(idx);
  }

  std::vector<StreamBatch> batches;
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    auto& idx = samples[t];
    if (idx.empty()) throw ConfigError("task " + std::to_string(t + 1) + " has no training samples");
    for (std::size_t i = idx.size(); i > 1; --i) std::swap(idx[i - 1], idx[uniform_index(rng, i)]);
    for (std::size_t start = 0; start < idx.size(); start += options.batch_size) {
      const std::size_t stop = std::min(idx.size(), start + options.batch_size);
      StreamBatch sb;
      sb.batch = dataset.gather({idx.begin() + static_cast<std::ptrdiff_t>(start),
                                 idx.begin() + static_cast<std::ptrdiff_t>(stop)});
      sb.task_id = static_cast<int>(t) + 1;
      sb.is_first_of_task = start == 0;
      sb.is_boundary = start == 0 && t > 0;
      batches.push_back(std::move(sb));
    }
  }
  return TaskStream(std::move(batches), std::move(tasks), options.batch_size);
}

std::vector<Batch> task_test_sets(const Dataset& dataset, const TaskStream& stream) {
  std::vector<Batch> sets;
  for (const auto& classes : stream.task_classes()) {
    std::vector<std::size_t> idx;
    for (std::size_t i : dataset.test_indices) {
      if (std::find(classes.begin(), classes.end(), dataset.labels[i]) != classes.end()) idx.push_back(i);
    }
    sets.push_back(dataset.gather(idx));
  }
  return sets;
}

}  // namespace pvbf
