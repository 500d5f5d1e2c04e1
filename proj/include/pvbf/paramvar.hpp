// SPDX-License-Identifier: Apache-2.0
#pragma once

// Per-parameter movement between two task snapshots and the standardizers
// that turn absolute movement into relative change.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pvbf/nncore.hpp"

namespace pvbf {

enum class Standardizer { kRR, kZS, kRS };

std::string_view to_string(Standardizer s);
std::optional<Standardizer> parse_standardizer(std::string_view name);

struct VariationRecord {
  int task_k = 0;
  std::vector<double> deltas;
  std::vector<double> rel_changes;
  Standardizer method = Standardizer::kRR;
};

/// |curr[m] - prev[m]| for every parameter.
std::vector<double> compute_deltas(std::span<const double> prev, std::span<const double> curr);
std::vector<double> compute_deltas(const Snapshot& prev, const Snapshot& curr);

/// RR: delta / mean. ZS: (delta - mean) / population std.
/// RS: (delta - median) / (P75 - P25).
/// A zero denominator yields the method's neutral output (1 for RR, 0 otherwise).
std::vector<double> standardize(std::span<const double> deltas, Standardizer method);

/// Linear interpolation between order statistics at rank q * (n - 1).
double percentile(std::span<const double> values, double q);

struct LayerProfileEntry {
  int layer_id;
  std::size_t num_parameters;
  double mean_rel_change;
  bool is_output;
};

/// Mean relative change over each layer's weights and bias together.
std::vector<LayerProfileEntry> layer_profile(std::span<const double> rel_changes, const NetworkLayout& layout);

struct Histogram {
  std::vector<double> edges;
  /// counts[0] is the underflow bin (< edges.front()), counts.back() the
  /// overflow bin (>= edges.back()); bin i in between is [edges[i-1], edges[i]).
  std::vector<std::size_t> counts;

  std::size_t total() const;
};

Histogram histogram(std::span<const double> values, std::span<const double> edges);

/// 2^-6, 2^-5, ..., 2^6.
std::vector<double> default_histogram_edges();

/// Fraction of entries strictly below `threshold`.
double fraction_below(std::span<const double> values, double threshold);

}  // namespace pvbf
