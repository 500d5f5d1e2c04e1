// SPDX-License-Identifier: Apache-2.0
#include "pvbf/dcwr.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pvbf/errors.hpp"

namespace pvbf {

ClassifierMemoryBank::ClassifierMemoryBank(std::size_t num_classes, std::size_t row_length)
    : row_length_(row_length),
      m_s_(num_classes, std::vector<double>(row_length, 0.0)),
      m_c_(num_classes, std::vector<double>(row_length, 0.0)),
      m_l_(num_classes, std::vector<double>(row_length, 0.0)),
      p_count_(num_classes, 0) {}

SensoryMemory sensory(const ParameterStore& store, std::span<const int> classes) {
  SensoryMemory out;
  out.classes.assign(classes.begin(), classes.end());
  std::sort(out.classes.begin(), out.classes.end());
  out.classes.erase(std::unique(out.classes.begin(), out.classes.end()), out.classes.end());
  if (out.classes.empty()) throw ContractError("sensory: empty class set");

  const std::size_t len = store.layout().classifier_row_length();
  std::vector<double> mean(len, 0.0);
  for (int j : out.classes) {
    out.rows.push_back(store.classifier_row(static_cast<std::size_t>(j)));
    for (std::size_t i = 0; i < len; ++i) mean[i] += out.rows.back()[i];
  }
  const double n = static_cast<double>(out.classes.size());
  for (double& v : mean) v /= n;
  for (auto& row : out.rows) {
    for (std::size_t i = 0; i < len; ++i) row[i] -= mean[i];
  }
  return out;
}

std::map<int, std::uint64_t> count_labels(std::span<const int> labels) {
  std::map<int, std::uint64_t> counts;
  for (int y : labels) ++counts[y];
  return counts;
}

void ClassifierMemoryBank::consolidate(const SensoryMemory& sensory, const std::map<int, std::uint64_t>& u_counts,
                                       double p, Rng& rng) {
  std::vector<double> eps(sensory.classes.size());
  for (double& e : eps) e = unit_uniform(rng);
  consolidate(sensory, u_counts, p, eps);
}

void ClassifierMemoryBank::consolidate(const SensoryMemory& sensory, const std::map<int, std::uint64_t>& u_counts,
                                       double p, std::span<const double> epsilons) {
  if (!(p >= 0.0 && p <= 1.0)) throw ContractError("consolidate: p must lie in [0, 1]");
  if (epsilons.size() != sensory.classes.size() || sensory.rows.size() != sensory.classes.size()) {
    throw ContractError("consolidate: one sensory row and one epsilon per class required");
  }
  for (std::size_t k = 0; k < sensory.classes.size(); ++k) {
    const int j = sensory.classes[k];
    if (j < 0 || static_cast<std::size_t>(j) >= num_classes()) {
      throw ContractError("consolidate: class " + std::to_string(j) + " out of range");
    }
    const auto u_it = u_counts.find(j);
    if (u_it == u_counts.end() || u_it->second == 0) {
      throw ContractError("consolidate: class " + std::to_string(j) + " has zero occurrences");
    }
    if (sensory.rows[k].size() != row_length_) throw ContractError("consolidate: row length mismatch");

    const double u = static_cast<double>(u_it->second);
    const double eta_c = static_cast<double>(p_count_[j]) / u;
    const double eta_l = std::sqrt(eta_c);
    std::vector<double>& mc = m_c_[j];
    std::vector<double>& ml = m_l_[j];
    m_s_[j] = sensory.rows[k];
    if (epsilons[k] < p) {
      for (std::size_t i = 0; i < row_length_; ++i) mc[i] = (mc[i] * eta_c + m_s_[j][i]) / (eta_c + 1.0);
    }
    for (std::size_t i = 0; i < row_length_; ++i) ml[i] = (ml[i] * eta_l + mc[i]) / (eta_l + 1.0);
    p_count_[j] += u_it->second;
  }
}

void ClassifierMemoryBank::install(ParameterStore& store) const {
  const NetworkLayout& lay = store.layout();
  if (lay.num_classes() != num_classes() || lay.classifier_row_length() != row_length_) {
    throw ContractError("install: memory bank shape does not match the classifier");
  }
  for (std::size_t j = 0; j < num_classes(); ++j) store.set_classifier_row(j, m_l_[j]);
}

}  // namespace pvbf
