// SPDX-License-Identifier: Apache-2.0
#pragma once

// Feed-forward classifier with manual backpropagation over a flat
// parameter vector.
//
// Parameters of dense layer l are stored as a row-major (out x in) weight
// block followed by its out-length bias block. The last layer is linear and
// produces logits; every other layer applies the configured activation.

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "pvbf/rng.hpp"

namespace pvbf {

struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }
  std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }
};

/// Stacks b below a. Column counts must match unless one side is empty.
Matrix vstack(const Matrix& a, const Matrix& b);

struct Batch {
  Matrix inputs;
  std::vector<int> labels;

  std::size_t size() const { return labels.size(); }
  bool empty() const { return labels.empty(); }
};

Batch concat(const Batch& a, const Batch& b);

enum class Activation { kTanh, kRelu };
enum class ParamKind { kDenseWeight, kDenseBias };

struct LayerRange {
  int layer_id;
  ParamKind kind;
  std::size_t start;
  std::size_t length;
};

/// Location of one output class's affine row: its weights and its bias.
struct ClassifierRow {
  std::size_t weight_start;
  std::size_t weight_length;
  std::size_t bias_index;
};

struct NetworkShape {
  std::size_t input_dim = 0;
  std::vector<std::size_t> hidden{64, 32};
  std::size_t num_classes = 0;
  Activation activation = Activation::kRelu;
};

class NetworkLayout {
 public:
  explicit NetworkLayout(NetworkShape shape);

  const NetworkShape& shape() const { return shape_; }
  std::size_t num_parameters() const { return num_parameters_; }
  std::size_t num_layers() const { return widths_.size() - 1; }
  std::size_t input_dim() const { return widths_.front(); }
  std::size_t num_classes() const { return widths_.back(); }
  std::size_t fan_in(std::size_t layer) const { return widths_[layer]; }
  std::size_t fan_out(std::size_t layer) const { return widths_[layer + 1]; }
  std::size_t weight_offset(std::size_t layer) const { return layer_map_[2 * layer].start; }
  std::size_t bias_offset(std::size_t layer) const { return layer_map_[2 * layer + 1].start; }
  int output_layer_id() const { return static_cast<int>(num_layers()) - 1; }

  const std::vector<LayerRange>& layer_map() const { return layer_map_; }
  const std::vector<ClassifierRow>& classifier_rows() const { return classifier_rows_; }
  /// Weights plus bias of one classifier row.
  std::size_t classifier_row_length() const { return fan_in(num_layers() - 1) + 1; }

 private:
  NetworkShape shape_;
  std::vector<std::size_t> widths_;
  std::vector<LayerRange> layer_map_;
  std::vector<ClassifierRow> classifier_rows_;
  std::size_t num_parameters_ = 0;
};

using LayoutPtr = std::shared_ptr<const NetworkLayout>;

class ParameterStore {
 public:
  /// All parameters zero.
  explicit ParameterStore(LayoutPtr layout);

  /// Uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)] for weights and biases.
  static ParameterStore initialized(LayoutPtr layout, Rng& rng);

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  const NetworkLayout& layout() const { return *layout_; }
  const LayoutPtr& layout_ptr() const { return layout_; }

  /// Class j's weights followed by its bias, copied out.
  std::vector<double> classifier_row(std::size_t j) const;
  void set_classifier_row(std::size_t j, std::span<const double> row);

 private:
  LayoutPtr layout_;
  std::vector<double> values_;
};

struct GradientVector {
  std::vector<double> values;
};

/// Immutable copy of a store's values.
class Snapshot {
 public:
  Snapshot(std::vector<double> values, LayoutPtr layout)
      : values_(std::make_shared<const std::vector<double>>(std::move(values))),
        layout_(std::move(layout)) {}

  std::span<const double> values() const { return *values_; }
  std::size_t size() const { return values_->size(); }
  const LayoutPtr& layout_ptr() const { return layout_; }

 private:
  std::shared_ptr<const std::vector<double>> values_;
  LayoutPtr layout_;
};

Snapshot snapshot(const ParameterStore& store);
Snapshot snapshot(const Snapshot& snap);

/// Activations kept for the backward pass; acts[0] is the input.
struct ForwardTrace {
  std::vector<Matrix> acts;
  Matrix& logits() { return acts.back(); }
  const Matrix& logits() const { return acts.back(); }
};

ForwardTrace forward_trace(const ParameterStore& store, const Matrix& inputs);
Matrix forward(const ParameterStore& store, const Matrix& inputs);
inline Matrix forward(const ParameterStore& store, const Batch& batch) {
  return forward(store, batch.inputs);
}

/// Gradient of the scalar loss whose derivative at the logits is
/// loss_grad_at_logits, with respect to every parameter.
GradientVector backward(const ParameterStore& store, const ForwardTrace& trace,
                        const Matrix& loss_grad_at_logits);
GradientVector backward(const ParameterStore& store, const Batch& batch,
                        const Matrix& loss_grad_at_logits);

void sgd_step(ParameterStore& store, const GradientVector& grads, double lr);

/// Index of the largest entry; the lowest index wins ties.
std::size_t argmax(std::span<const double> row);

}  // namespace pvbf
