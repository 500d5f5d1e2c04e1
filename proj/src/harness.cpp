// SPDX-License-Identifier: Apache-2.0
#include "pvbf/harness.hpp"

#include <atomic>
#include <chrono>
#include <mutex>
#include <numeric>
#include <thread>

#include "pvbf/errors.hpp"

namespace pvbf {

Strategy strategy_for(Method method) {
  switch (method) {
    case Method::kER: return {false, false, false};
    case Method::kERACE: return {true, false, false};
    case Method::kPVBF: return {true, true, true};
    case Method::kPVBFNoDCWR: return {true, true, false};
  }
  return {};
}

LearnerOptions LearnerOptions::from_config(const ExperimentConfig& config) {
  LearnerOptions o;
  o.strategy = strategy_for(config.method);
  o.lr = config.lr;
  o.alpha = config.alpha;
  o.beta = config.beta;
  o.p = config.p;
  o.standardizer = config.standardizer;
  o.dcwr_frequency = config.dcwr_frequency;
  o.dcwr_target = config.dcwr_target;
  o.buffer_capacity = config.buffer_capacity;
  o.replay_batch_size = config.effective_replay_batch();
  o.keep_snapshots = config.save_snapshots;
  return o;
}

TransitionDiagnostics diagnose(const VariationRecord& record, const NetworkLayout& layout) {
  TransitionDiagnostics d;
  d.task_k = record.task_k;
  const auto rr = standardize(record.deltas, Standardizer::kRR);
  d.below_mean_fraction = fraction_below(rr, 1.0);
  const auto profile = layer_profile(rr, layout);
  double hidden_sum = 0.0;
  std::size_t hidden_n = 0;
  for (const auto& entry : profile) {
    if (entry.is_output) {
      d.output_layer_mean_rr = entry.mean_rel_change;
    } else {
      hidden_sum += entry.mean_rel_change;
      ++hidden_n;
    }
  }
  d.hidden_layers_mean_rr = hidden_n ? hidden_sum / static_cast<double>(hidden_n) : 0.0;
  d.output_layer_dominates = hidden_n > 0 && d.output_layer_mean_rr > d.hidden_layers_mean_rr;
  return d;
}

Learner::Learner(LayoutPtr layout, const LearnerOptions& options, std::uint64_t seed)
    : options_(options),
      store_(layout),
      buffer_(options.buffer_capacity, layout->input_dim()),
      correlation_(layout->num_parameters(), options.alpha, options.beta),
      bank_(layout->num_classes(), layout->classifier_row_length()),
      init_rng_(make_rng(seed, RngStream::kInit)),
      buffer_rng_(make_rng(seed, RngStream::kBuffer)),
      eps_rng_(make_rng(seed, RngStream::kEpsilon)) {
  if (!(options.p >= 0.0 && options.p <= 1.0)) throw ConfigError("p must lie in [0, 1]");
  store_ = ParameterStore::initialized(std::move(layout), init_rng_);
}

void Learner::begin_task(int task_k) {
  task_start_ = snapshot(store_);
  if (options_.keep_snapshots && task_k == 1) snapshots_.push_back(*task_start_);
}

void Learner::train_step(const Batch& incoming, int task_k) {
  if (incoming.empty()) return;
  if (!task_start_) begin_task(task_k);

  const Batch replay = options_.buffer_capacity > 0 && options_.replay_batch_size > 0
                           ? buffer_.sample_batch(options_.replay_batch_size, buffer_rng_)
                           : Batch{Matrix(0, incoming.inputs.cols), {}};
  const Batch combined = concat(incoming, replay);
  const ClassSet curr = ClassSet::of_labels(incoming.labels);
  const ClassSet active = set_union(seen_, curr);

  const ForwardTrace trace = forward_trace(store_, combined.inputs);
  Matrix grad_logits;
  if (options_.strategy.ace) {
    const Matrix& logits = trace.logits();
    const std::size_t n_in = incoming.size();
    Matrix logits_in(n_in, logits.cols);
    Matrix logits_bf(replay.size(), logits.cols);
    std::copy(logits.data.begin(), logits.data.begin() + static_cast<std::ptrdiff_t>(n_in * logits.cols),
              logits_in.data.begin());
    std::copy(logits.data.begin() + static_cast<std::ptrdiff_t>(n_in * logits.cols), logits.data.end(),
              logits_bf.data.begin());
    AceLoss loss = ace_loss(logits_in, incoming.labels, logits_bf, replay.labels, curr, seen_);
    last_loss_ = loss.total;
    grad_logits = vstack(loss.grad_in, loss.grad_bf);
  } else {
    LossAndGrad loss = ce_masked(trace.logits(), combined.labels, active);
    last_loss_ = loss.loss;
    grad_logits = std::move(loss.grad);
  }

  GradientVector grads = backward(store_, trace, grad_logits);
  if (options_.strategy.ec && task_k > 1) grads = correlation_.adjust_gradients(grads);
  sgd_step(store_, grads, options_.lr);

  if (options_.strategy.dcwr && options_.dcwr_frequency == DcwrFrequency::kPerBatch) {
    run_dcwr(combined.labels);
  }
  last_combined_labels_ = combined.labels;

  buffer_.observe(incoming, buffer_rng_);
  seen_.merge(curr);
  ++steps_;
}

void Learner::run_dcwr(std::span<const int> combined_labels) {
  const SensoryMemory sm = sensory(store_, combined_labels);
  bank_.consolidate(sm, count_labels(combined_labels), options_.p, eps_rng_);
  if (options_.dcwr_target == DcwrTarget::kTrain) bank_.install(store_);
}

ParameterStore Learner::predictor() const {
  ParameterStore out = store_;
  if (options_.strategy.dcwr && options_.dcwr_target == DcwrTarget::kPredict) bank_.install(out);
  return out;
}

const VariationRecord& Learner::on_task_boundary(int finished_k) {
  if (!task_start_) throw ContractError("on_task_boundary called before begin_task");
  const Snapshot current = snapshot(store_);
  VariationRecord record;
  record.task_k = finished_k;
  record.method = options_.standardizer;
  record.deltas = compute_deltas(*task_start_, current);
  record.rel_changes = standardize(record.deltas, options_.standardizer);
  correlation_.merge_max(correlate(record.rel_changes, options_.alpha, options_.beta));
  if (options_.keep_snapshots) snapshots_.push_back(current);

  if (options_.strategy.dcwr && options_.dcwr_frequency == DcwrFrequency::kPerTask &&
      !last_combined_labels_.empty()) {
    run_dcwr(last_combined_labels_);
  }
  task_start_.reset();
  records_.push_back(std::move(record));
  return records_.back();
}

std::vector<double> Learner::evaluate(const std::vector<Batch>& test_sets, std::size_t through_task) const {
  const ParameterStore net = predictor();
  std::vector<double> column;
  for (std::size_t i = 0; i <= through_task && i < test_sets.size(); ++i) {
    const Batch& test = test_sets[i];
    if (test.empty()) throw ContractError("evaluate: empty test set for task " + std::to_string(i + 1));
    const Matrix logits = forward(net, test.inputs);
    std::size_t correct = 0;
    for (std::size_t r = 0; r < test.size(); ++r) {
      if (static_cast<int>(argmax(logits.row(r))) == test.labels[r]) ++correct;
    }
    column.push_back(static_cast<double>(correct) / static_cast<double>(test.size()));
  }
  return column;
}

Dataset load_dataset(const ExperimentConfig& config) {
  if (config.dataset == "blobs") {
    return gen_blobs(config.num_classes, config.input_dim, config.per_class, config.spread, config.data_seed);
  }
  if (!config.idx_test_images.empty()) {
    return load_idx_split(config.idx_images, config.idx_labels, config.idx_test_images, config.idx_test_labels);
  }
  Dataset ds = load_idx(config.idx_images, config.idx_labels);
  split_by_index(ds);
  return ds;
}

NetworkShape network_shape(const ExperimentConfig& config, const Dataset& dataset) {
  NetworkShape shape;
  shape.input_dim = dataset.input_dim();
  shape.hidden = config.hidden;
  shape.num_classes = dataset.num_classes;
  shape.activation = config.activation;
  return shape;
}

SeedResult run_seed(const ExperimentConfig& config, const Dataset& dataset, std::uint64_t seed) {
  return run_seed(config, dataset, seed, strategy_for(config.method));
}

SeedResult run_seed(const ExperimentConfig& config, const Dataset& dataset, std::uint64_t seed,
                    const Strategy& strategy) {
  SeedResult result;
  result.seed = seed;
  auto layout = std::make_shared<const NetworkLayout>(network_shape(config, dataset));

  Rng shuffle_rng = make_rng(seed, RngStream::kShuffle);
  StreamOptions stream_opts;
  stream_opts.num_tasks = config.num_tasks;
  stream_opts.classes_per_task = config.classes_per_task;
  stream_opts.batch_size = config.batch_size;
  stream_opts.shuffle_task_order = config.shuffle_task_order;
  TaskStream stream = make_split_stream(dataset, stream_opts, shuffle_rng);
  const std::vector<Batch> tests = task_test_sets(dataset, stream);
  const std::size_t k = stream.num_tasks();
  result.matrix = AccuracyMatrix(k);

  LearnerOptions options = LearnerOptions::from_config(config);
  options.strategy = strategy;

  try {
    Learner learner(layout, options, seed);
    auto close_task = [&](int finished) {
      learner.on_task_boundary(finished);
      const auto column = learner.evaluate(tests, static_cast<std::size_t>(finished - 1));
      for (std::size_t i = 0; i < column.size(); ++i) {
        result.matrix.set(i, static_cast<std::size_t>(finished - 1), column[i]);
      }
    };
    learner.begin_task(1);
    while (auto sb = stream.next_batch()) {
      if (sb->is_boundary) {
        close_task(sb->task_id - 1);
        learner.begin_task(sb->task_id);
      }
      learner.train_step(sb->batch, sb->task_id);
    }
    close_task(static_cast<int>(k));

    result.acc = acc(result.matrix);
    result.fr = k >= 2 ? fr(result.matrix) : 0.0;
    result.records = learner.records();
    for (const auto& rec : result.records) result.diagnostics.push_back(diagnose(rec, *layout));
    result.snapshots = learner.task_snapshots();
    result.final_parameters.assign(learner.store().values().begin(), learner.store().values().end());
    result.ok = true;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    result.error = e.what();
  }
  return result;
}

RunReport run_experiment(const ExperimentConfig& config) { return run_experiment(config, load_dataset(config)); }

RunReport run_experiment(const ExperimentConfig& config, const Dataset& dataset) {
  validate(config);
  const auto t0 = std::chrono::steady_clock::now();
  RunReport report;
  report.config = config;
  report.layout = std::make_shared<const NetworkLayout>(network_shape(config, dataset));
  report.seeds.resize(config.seeds.size());

  const std::size_t workers = std::max<std::size_t>(1, std::min(config.jobs, config.seeds.size()));
  std::atomic<std::size_t> next{0};
  std::exception_ptr config_failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < config.seeds.size(); i = next++) {
      try {
        report.seeds[i] = run_seed(config, dataset, config.seeds[i]);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!config_failure) config_failure = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (config_failure) std::rethrow_exception(config_failure);

  std::vector<double> accs;
  std::vector<double> frs;
  for (const auto& s : report.seeds) {
    if (!s.ok) continue;
    accs.push_back(s.acc);
    frs.push_back(s.fr);
  }
  if (accs.empty()) throw std::runtime_error("every seed failed; first error: " + report.seeds.front().error);
  report.acc_mean = std::accumulate(accs.begin(), accs.end(), 0.0) / static_cast<double>(accs.size());
  report.fr_mean = std::accumulate(frs.begin(), frs.end(), 0.0) / static_cast<double>(frs.size());
  if (accs.size() >= 2) {
    report.acc_ci = ci95(accs);
    report.fr_ci = ci95(frs);
  }
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

}  // namespace pvbf
