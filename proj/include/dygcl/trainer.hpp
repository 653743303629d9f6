#pragma once

#include <map>
#include <string>
#include <vector>

#include "dygcl/data.hpp"
#include "dygcl/model.hpp"

namespace dygcl {

struct Metrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  long tp = 0, fp = 0, fn = 0, tn = 0;
  // False when the denominator was zero and the metric was pinned to 0.
  bool precision_defined = true;
  bool recall_defined = true;
  bool f1_defined = true;
};

Metrics metrics_from_confusion(long tp, long fp, long fn, long tn);

struct EpochStats {
  double train_loss = 0.0;
  double val_loss = 0.0;
  Metrics val_metrics;
};

struct TrainHistory {
  std::vector<EpochStats> epochs;
  int best_epoch = -1;  // index into epochs, minimizes validation loss
};

struct SplitIndices {
  std::vector<int> train, val, test;
};

// Seeded shuffle, then 70/15/15 with the remainder going to train.
SplitIndices split_dataset(int num_samples, std::uint64_t seed);

// Epoch loop with Adam, early stopping on validation loss, best-epoch
// restore. The seed drives shuffling and dropout; the model carries its own
// init seed.
TrainHistory train(EventModel& model, const Dataset& data, const SplitIndices& split,
                   const FeatureTable& features, const ModelConfig& cfg, std::uint64_t seed);

// Probability threshold 0.5.
Metrics evaluate(EventModel& model, const Dataset& data, const std::vector<int>& subset,
                 const FeatureTable& features);

double mean_loss(EventModel& model, const Dataset& data, const std::vector<int>& subset,
                 const FeatureTable& features);

enum class ModelKind { kDygcl, kStaticGcn };

struct ExperimentResult {
  Metrics mean;
  Metrics stddev;
  std::vector<Metrics> per_seed;
  std::vector<TrainHistory> histories;
};

// Full protocol per seed in cfg.seeds: split, train, evaluate on test; then
// mean and standard deviation per metric.
ExperimentResult run_experiment(const Dataset& data, const FeatureTable& features,
                                const ModelConfig& cfg, ModelKind kind = ModelKind::kDygcl);

// One split/train/evaluate round of the union-graph reference model.
Metrics baseline_static_gcn(const Dataset& data, const FeatureTable& features,
                            const ModelConfig& cfg, std::uint64_t seed);

enum class SweepAxis { kHistoricDays, kLeadDays };
SweepAxis sweep_axis_from_string(const std::string& s);

// historic k: keep the last k snapshots; lead l: drop the final l-1.
Dataset truncate_history(const Dataset& data, int historic_days);
Dataset apply_lead(const Dataset& data, int lead_days);

struct SweepRow {
  int value = 0;
  Metrics mean;
  Metrics stddev;
};

std::vector<SweepRow> sensitivity_sweep(const Dataset& data, const FeatureTable& features,
                                        const ModelConfig& cfg, SweepAxis axis,
                                        const std::vector<int>& values);

// Standard moment estimates with bias correction; weight decay folds into
// the gradient before the moments.
class AdamOptimizer {
 public:
  AdamOptimizer(ParamStore& params, double lr, double weight_decay);
  void step();

 private:
  ParamStore* ps_;
  double lr_, weight_decay_;
  double beta1_ = 0.9, beta2_ = 0.999, eps_ = 1e-8;
  long t_ = 0;
  std::map<std::string, Mat> m_, v_;
};

}  // namespace dygcl
