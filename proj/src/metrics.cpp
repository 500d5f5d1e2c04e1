// SPDX-License-Identifier: Apache-2.0
#include "pvbf/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "pvbf/errors.hpp"

namespace pvbf {

AccuracyMatrix::AccuracyMatrix(std::size_t num_tasks)
    : k_(num_tasks), cells_(num_tasks * num_tasks, std::numeric_limits<double>::quiet_NaN()) {
  if (num_tasks == 0) throw ContractError("accuracy matrix needs at least one task");
}

void AccuracyMatrix::set(std::size_t i, std::size_t j, double accuracy) {
  if (i >= k_ || j >= k_) throw ContractError("accuracy matrix index out of range");
  if (!(accuracy >= 0.0 && accuracy <= 1.0)) throw ContractError("accuracy must lie in [0, 1]");
  cells_[i * k_ + j] = accuracy;
}

bool AccuracyMatrix::has(std::size_t i, std::size_t j) const { return !std::isnan(cells_.at(i * k_ + j)); }

double AccuracyMatrix::at(std::size_t i, std::size_t j) const {
  if (!has(i, j)) throw ContractError("accuracy matrix cell not evaluated");
  return cells_[i * k_ + j];
}

bool AccuracyMatrix::final_column_complete() const {
  for (std::size_t i = 0; i < k_; ++i) {
    if (!has(i, k_ - 1)) return false;
  }
  return true;
}

double acc(const AccuracyMatrix& m) {
  if (!m.final_column_complete()) throw ContractError("acc: final column incomplete");
  double sum = 0.0;
  for (std::size_t i = 0; i < m.num_tasks(); ++i) sum += m.at(i, m.num_tasks() - 1);
  return sum / static_cast<double>(m.num_tasks());
}

double fr(const AccuracyMatrix& m) {
  const std::size_t k = m.num_tasks();
  if (k < 2) throw ContractError("fr: forgetting is undefined for a single task");
  if (!m.final_column_complete()) throw ContractError("fr: final column incomplete");
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < k; ++i) {
    double best = m.at(i, k - 1);
    for (std::size_t j = 0; j < k; ++j) {
      if (m.has(i, j)) best = std::max(best, m.at(i, j));
    }
    sum += best - m.at(i, k - 1);
  }
  return sum / static_cast<double>(k - 1);
}

ConfidenceInterval ci95(std::span<const double> values) {
  if (values.size() < 2) throw ContractError("ci95 needs at least two values");
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  return {mean, 1.96 * sd / std::sqrt(n)};
}

}  // namespace pvbf
