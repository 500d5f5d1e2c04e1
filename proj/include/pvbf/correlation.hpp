// SPDX-License-Identifier: Apache-2.0
#pragma once

// Parameter/task correlation: min-max mapping of relative change into
// [alpha, beta], a running per-parameter maximum over finished tasks, and the
// gradient rescaling g / C that speeds up weakly-tied parameters and slows
// strongly-tied ones.

#include <cstddef>
#include <span>
#include <vector>

#include "pvbf/nncore.hpp"

namespace pvbf {

/// Affine map of rel_changes onto [alpha, beta]: min -> alpha, max -> beta.
/// If every value is equal the result is all alpha.
std::vector<double> correlate(std::span<const double> rel_changes, double alpha, double beta);

class CorrelationMap {
 public:
  CorrelationMap(std::size_t num_parameters, double alpha, double beta);

  /// Elementwise running maximum. The first merge copies c_k.
  void merge_max(std::span<const double> c_k);

  /// g / C per parameter. Requires at least one merged task.
  GradientVector adjust_gradients(const GradientVector& grads) const;

  std::span<const double> values() const { return c_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  int tasks_seen() const { return tasks_seen_; }

 private:
  std::vector<double> c_;
  double alpha_;
  double beta_;
  int tasks_seen_ = 0;
};

}  // namespace pvbf
