// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "pvbf/nncore.hpp"
#include "pvbf/rng.hpp"

namespace pvbf {

/// Fixed-capacity replay memory filled by reservoir sampling.
class ReplayBuffer {
 public:
  struct Slot {
    std::vector<double> input;
    int label;
  };

  ReplayBuffer(std::size_t capacity, std::size_t input_dim) : capacity_(capacity), input_dim_(input_dim) {}

  /// Counts the sample; keeps it with probability capacity / stream_count.
  void observe(std::span<const double> input, int label, Rng& rng);
  void observe(const Batch& batch, Rng& rng);

  /// min(n_req, size()) distinct slots chosen uniformly at random.
  Batch sample_batch(std::size_t n_req, Rng& rng) const;

  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return slots_.size(); }
  bool empty() const { return slots_.empty(); }
  std::uint64_t stream_count() const { return stream_count_; }
  const std::vector<Slot>& slots() const { return slots_; }

 private:
  std::size_t capacity_;
  std::size_t input_dim_;
  std::vector<Slot> slots_;
  std::uint64_t stream_count_ = 0;
};

}  // namespace pvbf
