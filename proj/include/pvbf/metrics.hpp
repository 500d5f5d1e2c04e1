// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace pvbf {

/// a(i, j): accuracy on task i's test set after training through task j.
/// Unevaluated cells (e.g. i > j) stay empty.
class AccuracyMatrix {
 public:
  explicit AccuracyMatrix(std::size_t num_tasks);

  std::size_t num_tasks() const { return k_; }
  void set(std::size_t i, std::size_t j, double accuracy);
  bool has(std::size_t i, std::size_t j) const;
  double at(std::size_t i, std::size_t j) const;
  /// True when the final column is filled for every task.
  bool final_column_complete() const;

 private:
  std::size_t k_;
  std::vector<double> cells_;
};

/// Mean of the final column.
double acc(const AccuracyMatrix& m);

/// Mean over tasks i < K of (max over filled a(i, ·)) - a(i, K).
double fr(const AccuracyMatrix& m);

struct ConfidenceInterval {
  double mean;
  double half_width;
};

/// Normal approximation: mean ± 1.96 · s / sqrt(n), s the sample std.
ConfidenceInterval ci95(std::span<const double> values);

}  // namespace pvbf
