// SPDX-License-Identifier: Apache-2.0
#include "pvbf/membuf.hpp"

#include <algorithm>
#include <numeric>

#include "pvbf/errors.hpp"

namespace pvbf {

void ReplayBuffer::observe(std::span<const double> input, int label, Rng& rng) {
  if (input.size() != input_dim_) throw ContractError("replay buffer: input dimension mismatch");
  ++stream_count_;
  if (capacity_ == 0) return;
  if (slots_.size() < capacity_) {
    slots_.push_back({{input.begin(), input.end()}, label});
    return;
  }
  const std::uint64_t j = uniform_index(rng, stream_count_);
  if (j < capacity_) slots_[j] = {{input.begin(), input.end()}, label};
}

void ReplayBuffer::observe(const Batch& batch, Rng& rng) {
  for (std::size_t r = 0; r < batch.size(); ++r) observe(batch.inputs.row(r), batch.labels[r], rng);
}

Batch ReplayBuffer::sample_batch(std::size_t n_req, Rng& rng) const {
  const std::size_t n = std::min(n_req, slots_.size());
  Batch out;
  out.inputs = Matrix(n, input_dim_);
  if (n == 0) return out;
  std::vector<std::size_t> idx(slots_.size());
  std::iota(idx.begin(), idx.end(), 0);
  // Partial Fisher-Yates: the first n entries are a uniform n-subset in uniform order.
  for (std::size_t i = 0; i < n; ++i) {
    std::swap(idx[i], idx[i + uniform_index(rng, idx.size() - i)]);
  }
  out.labels.reserve(n);
  for (std::size_t r = 0; r < n; ++r) {
    const Slot& s = slots_[idx[r]];
    std::copy(s.input.begin(), s.input.end(), out.inputs.row(r).begin());
    out.labels.push_back(s.label);
  }
  return out;
}

}  // namespace pvbf
