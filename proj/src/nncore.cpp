// SPDX-License-Identifier: Apache-2.0
#include "pvbf/nncore.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pvbf/errors.hpp"
#include "pvbf/simd.hpp"

namespace pvbf {

Matrix vstack(const Matrix& a, const Matrix& b) {
  if (a.rows == 0) return b;
  if (b.rows == 0) return a;
  if (a.cols != b.cols) throw ContractError("vstack: column count mismatch");
  Matrix out(a.rows + b.rows, a.cols);
  std::copy(a.data.begin(), a.data.end(), out.data.begin());
  std::copy(b.data.begin(), b.data.end(), out.data.begin() + static_cast<std::ptrdiff_t>(a.data.size()));
  return out;
}

Batch concat(const Batch& a, const Batch& b) {
  Batch out;
  out.inputs = vstack(a.inputs, b.inputs);
  out.labels = a.labels;
  out.labels.insert(out.labels.end(), b.labels.begin(), b.labels.end());
  return out;
}

NetworkLayout::NetworkLayout(NetworkShape shape) : shape_(std::move(shape)) {
  if (shape_.input_dim == 0 || shape_.num_classes == 0) {
    throw ConfigError("network needs a positive input dimension and class count");
  }
  widths_.push_back(shape_.input_dim);
  for (std::size_t h : shape_.hidden) {
    if (h == 0) throw ConfigError("hidden layer width must be positive");
    widths_.push_back(h);
  }
  widths_.push_back(shape_.num_classes);

  std::size_t offset = 0;
  for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
    const std::size_t w = widths_[l] * widths_[l + 1];
    layer_map_.push_back({static_cast<int>(l), ParamKind::kDenseWeight, offset, w});
    offset += w;
    layer_map_.push_back({static_cast<int>(l), ParamKind::kDenseBias, offset, widths_[l + 1]});
    offset += widths_[l + 1];
  }
  num_parameters_ = offset;

  const std::size_t last = num_layers() - 1;
  const std::size_t in = fan_in(last);
  for (std::size_t j = 0; j < num_classes(); ++j) {
    classifier_rows_.push_back({weight_offset(last) + j * in, in, bias_offset(last) + j});
  }
}

ParameterStore::ParameterStore(LayoutPtr layout)
    : layout_(std::move(layout)), values_(layout_->num_parameters(), 0.0) {}

ParameterStore ParameterStore::initialized(LayoutPtr layout, Rng& rng) {
  ParameterStore store(std::move(layout));
  const NetworkLayout& lay = store.layout();
  for (const LayerRange& range : lay.layer_map()) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(lay.fan_in(range.layer_id)));
    for (std::size_t i = 0; i < range.length; ++i) {
      store.values_[range.start + i] = (2.0 * unit_uniform(rng) - 1.0) * bound;
    }
  }
  return store;
}

std::vector<double> ParameterStore::classifier_row(std::size_t j) const {
  const ClassifierRow& cr = layout_->classifier_rows().at(j);
  std::vector<double> row(values_.begin() + static_cast<std::ptrdiff_t>(cr.weight_start),
                          values_.begin() + static_cast<std::ptrdiff_t>(cr.weight_start + cr.weight_length));
  row.push_back(values_[cr.bias_index]);
  return row;
}

void ParameterStore::set_classifier_row(std::size_t j, std::span<const double> row) {
  const ClassifierRow& cr = layout_->classifier_rows().at(j);
  if (row.size() != cr.weight_length + 1) {
    throw ContractError("classifier row length mismatch");
  }
  std::copy(row.begin(), row.end() - 1, values_.begin() + static_cast<std::ptrdiff_t>(cr.weight_start));
  values_[cr.bias_index] = row.back();
}

Snapshot snapshot(const ParameterStore& store) {
  return Snapshot({store.values().begin(), store.values().end()}, store.layout_ptr());
}

Snapshot snapshot(const Snapshot& snap) {
  return Snapshot({snap.values().begin(), snap.values().end()}, snap.layout_ptr());
}

namespace {

void check_finite(std::span<const double> values, int layer_id, const char* what) {
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw NumericError(std::string("non-finite ") + what + " in layer " + std::to_string(layer_id),
                         layer_id);
    }
  }
}

void apply_activation(Activation act, Matrix& m) {
  if (act == Activation::kTanh) {
    for (double& v : m.data) v = std::tanh(v);
  } else {
    for (double& v : m.data) v = v > 0.0 ? v : 0.0;
  }
}

// Derivative expressed through the activation output a = f(z).
void multiply_activation_grad(Activation act, const Matrix& a, Matrix& grad) {
  if (act == Activation::kTanh) {
    for (std::size_t i = 0; i < grad.data.size(); ++i) grad.data[i] *= 1.0 - a.data[i] * a.data[i];
  } else {
    for (std::size_t i = 0; i < grad.data.size(); ++i) {
      if (!(a.data[i] > 0.0)) grad.data[i] = 0.0;
    }
  }
}

}  // namespace

ForwardTrace forward_trace(const ParameterStore& store, const Matrix& inputs) {
  const NetworkLayout& lay = store.layout();
  if (inputs.rows > 0 && inputs.cols != lay.input_dim()) {
    throw ConfigError("input dimension " + std::to_string(inputs.cols) + " does not match network input " +
                      std::to_string(lay.input_dim()));
  }
  ForwardTrace trace;
  trace.acts.reserve(lay.num_layers() + 1);
  trace.acts.push_back(inputs);
  if (inputs.rows == 0) trace.acts.back().cols = lay.input_dim();

  const auto params = store.values();
  for (std::size_t l = 0; l < lay.num_layers(); ++l) {
    const std::size_t in = lay.fan_in(l);
    const std::size_t out = lay.fan_out(l);
    const double* w = params.data() + lay.weight_offset(l);
    const double* b = params.data() + lay.bias_offset(l);
    const Matrix& prev = trace.acts.back();
    Matrix z(prev.rows, out);
    for (std::size_t r = 0; r < prev.rows; ++r) {
      const auto x = prev.row(r);
      for (std::size_t o = 0; o < out; ++o) {
        z(r, o) = b[o] + simd::dot({w + o * in, in}, x);
      }
    }
    if (l + 1 < lay.num_layers()) apply_activation(lay.shape().activation, z);
    check_finite(z.data, static_cast<int>(l), "activation");
    trace.acts.push_back(std::move(z));
  }
  return trace;
}

Matrix forward(const ParameterStore& store, const Matrix& inputs) {
  return std::move(forward_trace(store, inputs).logits());
}

GradientVector backward(const ParameterStore& store, const ForwardTrace& trace,
                        const Matrix& loss_grad_at_logits) {
  const NetworkLayout& lay = store.layout();
  const Matrix& logits = trace.logits();
  if (loss_grad_at_logits.rows != logits.rows || loss_grad_at_logits.cols != logits.cols) {
    throw ContractError("backward: loss gradient shape does not match logits");
  }
  GradientVector grads{std::vector<double>(lay.num_parameters(), 0.0)};
  const auto params = store.values();

  Matrix delta = loss_grad_at_logits;
  for (std::size_t li = lay.num_layers(); li-- > 0;) {
    const int layer_id = static_cast<int>(li);
    const std::size_t in = lay.fan_in(li);
    const std::size_t out = lay.fan_out(li);
    const Matrix& a_prev = trace.acts[li];
    double* gw = grads.values.data() + lay.weight_offset(li);
    double* gb = grads.values.data() + lay.bias_offset(li);
    const double* w = params.data() + lay.weight_offset(li);

    for (std::size_t r = 0; r < delta.rows; ++r) {
      const auto x = a_prev.row(r);
      for (std::size_t o = 0; o < out; ++o) {
        const double d = delta(r, o);
        if (d == 0.0) continue;
        simd::axpy(d, x, {gw + o * in, in});
        gb[o] += d;
      }
    }
    check_finite({gw, in * out}, layer_id, "weight gradient");
    check_finite({gb, out}, layer_id, "bias gradient");

    if (li == 0) break;
    Matrix prev_delta(delta.rows, in);
    for (std::size_t r = 0; r < delta.rows; ++r) {
      auto dst = prev_delta.row(r);
      for (std::size_t o = 0; o < out; ++o) {
        const double d = delta(r, o);
        if (d == 0.0) continue;
        simd::axpy(d, {w + o * in, in}, dst);
      }
    }
    multiply_activation_grad(lay.shape().activation, a_prev, prev_delta);
    delta = std::move(prev_delta);
  }
  return grads;
}

GradientVector backward(const ParameterStore& store, const Batch& batch,
                        const Matrix& loss_grad_at_logits) {
  return backward(store, forward_trace(store, batch.inputs), loss_grad_at_logits);
}

void sgd_step(ParameterStore& store, const GradientVector& grads, double lr) {
  if (grads.values.size() != store.values().size()) {
    throw ContractError("sgd_step: gradient length does not match parameter count");
  }
  if (!(lr >= 0.0) || !std::isfinite(lr)) throw ContractError("sgd_step: learning rate must be >= 0");
  simd::axpy(-lr, grads.values, store.values());
}

std::size_t argmax(std::span<const double> row) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < row.size(); ++i) {
    if (row[i] > row[best]) best = i;
  }
  return best;
}

}  // namespace pvbf
