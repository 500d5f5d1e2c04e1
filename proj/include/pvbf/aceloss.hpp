// SPDX-License-Identifier: Apache-2.0
#pragma once

// Cross-entropy restricted to a set of active classes, and the asymmetric
// incoming/replay combination used by ER-ACE and PVBF.

#include <initializer_list>
#include <set>
#include <span>
#include <vector>

#include "pvbf/nncore.hpp"

namespace pvbf {

class ClassSet {
 public:
  ClassSet() = default;
  ClassSet(std::initializer_list<int> ids) : ids_(ids) {}
  template <class It>
  ClassSet(It first, It last) : ids_(first, last) {}

  bool contains(int c) const { return ids_.count(c) != 0; }
  void insert(int c) { ids_.insert(c); }
  void merge(const ClassSet& other) { ids_.insert(other.ids_.begin(), other.ids_.end()); }
  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }
  auto begin() const { return ids_.begin(); }
  auto end() const { return ids_.end(); }
  bool operator==(const ClassSet&) const = default;

  static ClassSet of_labels(std::span<const int> labels) { return {labels.begin(), labels.end()}; }
  friend ClassSet set_union(const ClassSet& a, const ClassSet& b) {
    ClassSet out = a;
    out.merge(b);
    return out;
  }

 private:
  std::set<int> ids_;
};

struct LossAndGrad {
  double loss = 0.0;
  Matrix grad;  // d loss / d logits, same shape as the logits
};

/// Mean negative log-likelihood with softmax over `active` only. Inactive
/// columns get zero gradient. An empty batch yields loss 0.
LossAndGrad ce_masked(const Matrix& logits, std::span<const int> labels, const ClassSet& active);

struct AceLoss {
  double total = 0.0;
  double incoming = 0.0;
  double replay = 0.0;
  Matrix grad_in;
  Matrix grad_bf;
};

/// ce_masked(incoming, curr) + ce_masked(replay, seen ∪ curr).
AceLoss ace_loss(const Matrix& logits_in, std::span<const int> labels_in, const Matrix& logits_bf,
                 std::span<const int> labels_bf, const ClassSet& curr_classes, const ClassSet& seen_classes);

}  // namespace pvbf
