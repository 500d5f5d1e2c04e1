// SPDX-License-Identifier: Apache-2.0
#pragma once

// The online training loop and the multi-seed experiment driver.
//
// One Learner owns every piece of mutable state of a single run. Per incoming
// batch it: samples a replay batch, computes the method's loss, backprops,
// rescales gradients by parameter correlation (from task 2 on), steps SGD,
// runs classifier consolidation, and finally admits the incoming samples to
// the replay buffer. With dcwr_target = predict the consolidated rows form
// the evaluation classifier and SGD keeps training its own rows; with
// dcwr_target = train they overwrite the trained rows after every
// consolidation. At every task boundary it measures how far each
// parameter moved during the finished task and folds that into the
// correlation map.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pvbf/aceloss.hpp"
#include "pvbf/config.hpp"
#include "pvbf/correlation.hpp"
#include "pvbf/dcwr.hpp"
#include "pvbf/membuf.hpp"
#include "pvbf/metrics.hpp"
#include "pvbf/nncore.hpp"
#include "pvbf/paramvar.hpp"
#include "pvbf/streamgen.hpp"

namespace pvbf {

/// Which mechanisms are switched on. Methods are fixed combinations.
struct Strategy {
  bool ace = false;   // asymmetric incoming/replay loss
  bool ec = false;    // correlation-scaled gradients
  bool dcwr = false;  // classifier memory consolidation
};

Strategy strategy_for(Method method);

struct LearnerOptions {
  Strategy strategy;
  double lr = 0.1;
  double alpha = 0.5;
  double beta = 2.0;
  double p = 0.9;
  Standardizer standardizer = Standardizer::kRR;
  DcwrFrequency dcwr_frequency = DcwrFrequency::kPerBatch;
  DcwrTarget dcwr_target = DcwrTarget::kPredict;
  std::size_t buffer_capacity = 50;
  std::size_t replay_batch_size = 10;
  bool keep_snapshots = false;

  static LearnerOptions from_config(const ExperimentConfig& config);
};

/// Imbalance summary of one task transition, computed on the RR scale
/// regardless of the configured standardizer.
struct TransitionDiagnostics {
  int task_k = 0;
  /// Fraction of parameters that moved less than the mean movement.
  double below_mean_fraction = 0.0;
  double output_layer_mean_rr = 0.0;
  /// Mean over the preceding layers of their mean RR.
  double hidden_layers_mean_rr = 0.0;
  bool output_layer_dominates = false;
};

TransitionDiagnostics diagnose(const VariationRecord& record, const NetworkLayout& layout);

class Learner {
 public:
  Learner(LayoutPtr layout, const LearnerOptions& options, std::uint64_t seed);

  /// Records the task's starting parameters. Call before its first batch.
  void begin_task(int task_k);
  void train_step(const Batch& incoming, int task_k);
  /// Closes task `finished_k`: measures parameter movement and merges the
  /// resulting correlations. Returns the stored record.
  const VariationRecord& on_task_boundary(int finished_k);

  /// Single-head accuracy on test_sets[0..through_task].
  std::vector<double> evaluate(const std::vector<Batch>& test_sets, std::size_t through_task) const;

  /// Network being trained.
  const ParameterStore& store() const { return store_; }
  /// Network used for evaluation: the trained network, with the long-term
  /// classifier rows swapped in when D-CWR targets prediction.
  ParameterStore predictor() const;
  ParameterStore& mutable_store() { return store_; }
  const CorrelationMap& correlation() const { return correlation_; }
  const ClassifierMemoryBank& bank() const { return bank_; }
  const ReplayBuffer& buffer() const { return buffer_; }
  const ClassSet& seen_classes() const { return seen_; }
  const std::vector<VariationRecord>& records() const { return records_; }
  /// Parameters at each task start plus at stream end (only if keep_snapshots).
  const std::vector<Snapshot>& task_snapshots() const { return snapshots_; }
  std::size_t steps() const { return steps_; }
  double last_loss() const { return last_loss_; }

 private:
  void run_dcwr(std::span<const int> combined_labels);

  LearnerOptions options_;
  ParameterStore store_;
  ReplayBuffer buffer_;
  CorrelationMap correlation_;
  ClassifierMemoryBank bank_;
  ClassSet seen_;
  Rng init_rng_;
  Rng buffer_rng_;
  Rng eps_rng_;
  std::optional<Snapshot> task_start_;
  std::vector<int> last_combined_labels_;
  std::vector<VariationRecord> records_;
  std::vector<Snapshot> snapshots_;
  std::size_t steps_ = 0;
  double last_loss_ = 0.0;
};

struct SeedResult {
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  AccuracyMatrix matrix{1};
  double acc = 0.0;
  double fr = 0.0;
  std::vector<VariationRecord> records;
  std::vector<TransitionDiagnostics> diagnostics;
  std::vector<Snapshot> snapshots;
  std::vector<double> final_parameters;
};

/// One full pass over the stream built from `dataset` with `seed`.
SeedResult run_seed(const ExperimentConfig& config, const Dataset& dataset, std::uint64_t seed);
SeedResult run_seed(const ExperimentConfig& config, const Dataset& dataset, std::uint64_t seed,
                    const Strategy& strategy);

struct RunReport {
  ExperimentConfig config;
  std::vector<SeedResult> seeds;
  std::optional<ConfidenceInterval> acc_ci;
  std::optional<ConfidenceInterval> fr_ci;
  double acc_mean = 0.0;
  double fr_mean = 0.0;
  double wall_seconds = 0.0;
  LayoutPtr layout;
};

Dataset load_dataset(const ExperimentConfig& config);
NetworkShape network_shape(const ExperimentConfig& config, const Dataset& dataset);

/// Runs every seed (config.jobs at a time) and aggregates ACC / FR.
RunReport run_experiment(const ExperimentConfig& config);
RunReport run_experiment(const ExperimentConfig& config, const Dataset& dataset);

}  // namespace pvbf
