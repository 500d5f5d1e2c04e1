// SPDX-License-Identifier: Apache-2.0
#include "pvbf/aceloss.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "pvbf/errors.hpp"

namespace pvbf {

LossAndGrad ce_masked(const Matrix& logits, std::span<const int> labels, const ClassSet& active) {
  if (active.empty()) throw ContractError("ce_masked: active class set is empty");
  if (labels.size() != logits.rows) throw ContractError("ce_masked: label count does not match logits");
  for (int c : active) {
    if (c < 0 || static_cast<std::size_t>(c) >= logits.cols) {
      throw ContractError("ce_masked: active class " + std::to_string(c) + " outside logit range");
    }
  }

  LossAndGrad out;
  out.grad = Matrix(logits.rows, logits.cols);
  if (logits.rows == 0) return out;
  const double inv_n = 1.0 / static_cast<double>(logits.rows);

  double total = 0.0;
  for (std::size_t r = 0; r < logits.rows; ++r) {
    const int y = labels[r];
    if (!active.contains(y)) {
      throw ContractError("ce_masked: label " + std::to_string(y) + " is not an active class");
    }
    double mx = -std::numeric_limits<double>::infinity();
    for (int c : active) mx = std::max(mx, logits(r, c));
    double z = 0.0;
    for (int c : active) z += std::exp(logits(r, c) - mx);
    const double log_z = std::log(z) + mx;
    total += log_z - logits(r, y);
    for (int c : active) out.grad(r, c) = std::exp(logits(r, c) - log_z) * inv_n;
    out.grad(r, y) -= inv_n;
  }
  out.loss = total * inv_n;
  return out;
}

AceLoss ace_loss(const Matrix& logits_in, std::span<const int> labels_in, const Matrix& logits_bf,
                 std::span<const int> labels_bf, const ClassSet& curr_classes, const ClassSet& seen_classes) {
  AceLoss out;
  LossAndGrad in = ce_masked(logits_in, labels_in, curr_classes);
  out.incoming = in.loss;
  out.grad_in = std::move(in.grad);
  if (logits_bf.rows > 0) {
    LossAndGrad re = ce_masked(logits_bf, labels_bf, set_union(seen_classes, curr_classes));
    out.replay = re.loss;
    out.grad_bf = std::move(re.grad);
  } else {
    out.grad_bf = Matrix(0, logits_in.cols);
  }
  out.total = out.incoming + out.replay;
  return out;
}

}  // namespace pvbf
