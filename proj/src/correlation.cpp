// SPDX-License-Identifier: Apache-2.0
#include "pvbf/correlation.hpp"

#include <algorithm>
#include <string>

#include "pvbf/errors.hpp"
#include "pvbf/simd.hpp"

namespace pvbf {

namespace {

void check_range(double alpha, double beta) {
  if (!(alpha > 0.0) || !(alpha <= beta)) {
    throw ConfigError("correlation range needs 0 < alpha <= beta");
  }
}

}  // namespace

std::vector<double> correlate(std::span<const double> rel_changes, double alpha, double beta) {
  check_range(alpha, beta);
  std::vector<double> out(rel_changes.size(), alpha);
  if (rel_changes.empty()) return out;
  const auto [lo_it, hi_it] = std::minmax_element(rel_changes.begin(), rel_changes.end());
  const double lo = *lo_it;
  const double range = *hi_it - lo;
  if (!(range > 0.0)) return out;
  const double width = beta - alpha;
  for (std::size_t m = 0; m < rel_changes.size(); ++m) {
    const double t = (rel_changes[m] - lo) / range;
    out[m] = std::clamp(t * width + alpha, alpha, beta);
  }
  return out;
}

CorrelationMap::CorrelationMap(std::size_t num_parameters, double alpha, double beta)
    : c_(num_parameters, 0.0), alpha_(alpha), beta_(beta) {
  check_range(alpha, beta);
}

void CorrelationMap::merge_max(std::span<const double> c_k) {
  if (c_k.size() != c_.size()) throw ContractError("merge_max: length mismatch");
  if (tasks_seen_ == 0) {
    std::copy(c_k.begin(), c_k.end(), c_.begin());
  } else {
    for (std::size_t m = 0; m < c_.size(); ++m) c_[m] = std::max(c_[m], c_k[m]);
  }
  ++tasks_seen_;
}

GradientVector CorrelationMap::adjust_gradients(const GradientVector& grads) const {
  if (tasks_seen_ < 1) throw ContractError("adjust_gradients: no task has been merged yet");
  if (grads.values.size() != c_.size()) throw ContractError("adjust_gradients: length mismatch");
  for (std::size_t m = 0; m < c_.size(); ++m) {
    if (!(c_[m] >= alpha_ && c_[m] <= beta_)) {
      throw StateError("correlation " + std::to_string(c_[m]) + " at parameter " + std::to_string(m) +
                       " is outside [alpha, beta]");
    }
  }
  GradientVector out{std::vector<double>(c_.size())};
  simd::divide(grads.values, c_, out.values);
  return out;
}

}  // namespace pvbf
