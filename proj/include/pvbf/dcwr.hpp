// SPDX-License-Identifier: Apache-2.0
#pragma once

// Dual-layer copy-weights classifier memory.
//
// After each optimizer step the output rows of the classes present in the
// batch are mean-shifted (sensory memory), blended into a short-term memory
// with probability p, then blended into a long-term memory. Blend weights
// grow with the number of times a class has been seen, so frequently seen
// classes move slowly. The long-term rows are finally written back into the
// classifier. A "row" is the class's weights with its bias appended.

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "pvbf/nncore.hpp"
#include "pvbf/rng.hpp"

namespace pvbf {

/// Sensory rows for the classes of one batch, ascending by class id.
struct SensoryMemory {
  std::vector<int> classes;
  std::vector<std::vector<double>> rows;
};

class ClassifierMemoryBank {
 public:
  ClassifierMemoryBank(std::size_t num_classes, std::size_t row_length);

  std::size_t num_classes() const { return m_s_.size(); }
  std::size_t row_length() const { return row_length_; }

  std::span<const double> sensory(std::size_t j) const { return m_s_.at(j); }
  std::span<const double> short_term(std::size_t j) const { return m_c_.at(j); }
  std::span<const double> long_term(std::size_t j) const { return m_l_.at(j); }
  std::uint64_t occurrences(std::size_t j) const { return p_count_.at(j); }

  /// Applies one batch. `sensory` must list the same classes as `u_counts`.
  /// One epsilon ~ U[0,1) is drawn per class, in ascending class order.
  void consolidate(const SensoryMemory& sensory, const std::map<int, std::uint64_t>& u_counts, double p,
                   Rng& rng);

  /// Same as above with caller-supplied epsilons (one per sensory class).
  void consolidate(const SensoryMemory& sensory, const std::map<int, std::uint64_t>& u_counts, double p,
                   std::span<const double> epsilons);

  /// Overwrites every classifier row with its long-term memory.
  void install(ParameterStore& store) const;

 private:
  std::size_t row_length_;
  std::vector<std::vector<double>> m_s_;
  std::vector<std::vector<double>> m_c_;
  std::vector<std::vector<double>> m_l_;
  std::vector<std::uint64_t> p_count_;
};

/// Class rows minus their mean over `classes` (duplicates ignored).
SensoryMemory sensory(const ParameterStore& store, std::span<const int> classes);

/// Occurrence count per class of a label list.
std::map<int, std::uint64_t> count_labels(std::span<const int> labels);

}  // namespace pvbf
