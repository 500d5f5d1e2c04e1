// SPDX-License-Identifier: Apache-2.0
#include "pvbf/paramvar.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pvbf/errors.hpp"
#include "pvbf/simd.hpp"

namespace pvbf {

std::string_view to_string(Standardizer s) {
  switch (s) {
    case Standardizer::kRR: return "RR";
    case Standardizer::kZS: return "ZS";
    case Standardizer::kRS: return "RS";
  }
  return "?";
}

std::optional<Standardizer> parse_standardizer(std::string_view name) {
  if (name == "RR") return Standardizer::kRR;
  if (name == "ZS") return Standardizer::kZS;
  if (name == "RS") return Standardizer::kRS;
  return std::nullopt;
}

std::vector<double> compute_deltas(std::span<const double> prev, std::span<const double> curr) {
  if (prev.size() != curr.size()) throw ContractError("compute_deltas: snapshot lengths differ");
  std::vector<double> out(prev.size());
  simd::abs_diff(curr, prev, out);
  return out;
}

std::vector<double> compute_deltas(const Snapshot& prev, const Snapshot& curr) {
  return compute_deltas(prev.values(), curr.values());
}

double percentile(std::span<const double> values, double q) {
  if (values.empty()) throw ContractError("percentile of an empty sequence");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + (sorted[hi] - sorted[lo]) * frac;
}

std::vector<double> standardize(std::span<const double> deltas, Standardizer method) {
  const std::size_t n = deltas.size();
  if (n == 0) return {};
  std::vector<double> out(n);
  const double mean = std::accumulate(deltas.begin(), deltas.end(), 0.0) / static_cast<double>(n);

  switch (method) {
    case Standardizer::kRR:
      if (mean > 0.0) {
        for (std::size_t i = 0; i < n; ++i) out[i] = deltas[i] / mean;
      } else {
        std::fill(out.begin(), out.end(), 1.0);
      }
      break;
    case Standardizer::kZS: {
      double ss = 0.0;
      for (double d : deltas) ss += (d - mean) * (d - mean);
      const double sigma = std::sqrt(ss / static_cast<double>(n));
      if (sigma > 0.0) {
        for (std::size_t i = 0; i < n; ++i) out[i] = (deltas[i] - mean) / sigma;
      } else {
        std::fill(out.begin(), out.end(), 0.0);
      }
      break;
    }
    case Standardizer::kRS: {
      std::vector<double> sorted(deltas.begin(), deltas.end());
      std::sort(sorted.begin(), sorted.end());
      auto at = [&](double q) {
        const double pos = q * static_cast<double>(n - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const std::size_t hi = std::min(lo + 1, n - 1);
        return sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - static_cast<double>(lo));
      };
      const double median = at(0.5);
      const double iqr = at(0.75) - at(0.25);
      if (iqr > 0.0) {
        for (std::size_t i = 0; i < n; ++i) out[i] = (deltas[i] - median) / iqr;
      } else {
        std::fill(out.begin(), out.end(), 0.0);
      }
      break;
    }
  }
  return out;
}

std::vector<LayerProfileEntry> layer_profile(std::span<const double> rel_changes, const NetworkLayout& layout) {
  if (rel_changes.size() != layout.num_parameters()) {
    throw ContractError("layer_profile: rel_changes length does not match the network");
  }
  std::vector<LayerProfileEntry> profile;
  for (std::size_t l = 0; l < layout.num_layers(); ++l) {
    profile.push_back({static_cast<int>(l), 0, 0.0, static_cast<int>(l) == layout.output_layer_id()});
  }
  std::vector<double> sums(profile.size(), 0.0);
  for (const LayerRange& range : layout.layer_map()) {
    for (std::size_t i = 0; i < range.length; ++i) sums[range.layer_id] += rel_changes[range.start + i];
    profile[range.layer_id].num_parameters += range.length;
  }
  for (std::size_t l = 0; l < profile.size(); ++l) {
    profile[l].mean_rel_change = sums[l] / static_cast<double>(profile[l].num_parameters);
  }
  return profile;
}

std::size_t Histogram::total() const { return std::accumulate(counts.begin(), counts.end(), std::size_t{0}); }

Histogram histogram(std::span<const double> values, std::span<const double> edges) {
  if (edges.empty()) throw ContractError("histogram: no edges");
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (!(edges[i] > edges[i - 1])) throw ContractError("histogram: edges must be strictly increasing");
  }
  Histogram h{{edges.begin(), edges.end()}, std::vector<std::size_t>(edges.size() + 1, 0)};
  for (double v : values) {
    // Number of edges <= v is exactly the bin index under the layout above.
    const auto bin = static_cast<std::size_t>(std::upper_bound(edges.begin(), edges.end(), v) - edges.begin());
    ++h.counts[bin];
  }
  return h;
}

std::vector<double> default_histogram_edges() {
  std::vector<double> edges;
  for (int e = -6; e <= 6; ++e) edges.push_back(std::ldexp(1.0, e));
  return edges;
}

double fraction_below(std::span<const double> values, double threshold) {
  if (values.empty()) return 0.0;
  const auto n = std::count_if(values.begin(), values.end(), [&](double v) { return v < threshold; });
  return static_cast<double>(n) / static_cast<double>(values.size());
}

}  // namespace pvbf
