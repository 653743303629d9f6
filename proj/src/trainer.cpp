#include "dygcl/trainer.hpp"

#include <algorithm>
#include <cmath>

namespace dygcl {

Metrics metrics_from_confusion(long tp, long fp, long fn, long tn) {
  Metrics m;
  m.tp = tp;
  m.fp = fp;
  m.fn = fn;
  m.tn = tn;
  const long total = tp + fp + fn + tn;
  m.accuracy = total > 0 ? static_cast<double>(tp + tn) / static_cast<double>(total) : 0.0;
  if (tp + fp > 0) {
    m.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  } else {
    m.precision_defined = false;
  }
  if (tp + fn > 0) {
    m.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  } else {
    m.recall_defined = false;
  }
  if (m.precision + m.recall > 0.0) {
    m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
  } else {
    m.f1_defined = false;
  }
  return m;
}

SplitIndices split_dataset(int num_samples, std::uint64_t seed) {
  if (num_samples < 10) throw ValidationError("need at least 10 samples to split");
  std::vector<int> order(static_cast<std::size_t>(num_samples));
  for (int i = 0; i < num_samples; ++i) order[static_cast<std::size_t>(i)] = i;
  Rng rng(seed);
  rng.shuffle(order);

  const int n_val = num_samples * 15 / 100;
  const int n_test = num_samples * 15 / 100;
  const int n_train = num_samples - n_val - n_test;

  SplitIndices split;
  split.train.assign(order.begin(), order.begin() + n_train);
  split.val.assign(order.begin() + n_train, order.begin() + n_train + n_val);
  split.test.assign(order.begin() + n_train + n_val, order.end());
  return split;
}

double mean_loss(EventModel& model, const Dataset& data, const std::vector<int>& subset,
                 const FeatureTable& features) {
  if (subset.empty()) throw ValidationError("empty split");
  double total = 0.0;
  for (int i : subset) {
    const auto& s = data.samples[static_cast<std::size_t>(i)];
    Tape tape;
    total += model.sample_loss(tape, s, features_for(features, s).h_sem, nullptr, false, nullptr)
                 .scalar();
  }
  return total / static_cast<double>(subset.size());
}

Metrics evaluate(EventModel& model, const Dataset& data, const std::vector<int>& subset,
                 const FeatureTable& features) {
  if (subset.empty()) throw ValidationError("empty split");
  long tp = 0, fp = 0, fn = 0, tn = 0;
  for (int i : subset) {
    const auto& s = data.samples[static_cast<std::size_t>(i)];
    Tape tape;
    double y_hat = 0.0;
    model.sample_loss(tape, s, features_for(features, s).h_sem, nullptr, false, &y_hat);
    const int predicted = y_hat >= 0.5 ? 1 : 0;
    if (predicted == 1 && s.label == 1) ++tp;
    if (predicted == 1 && s.label == 0) ++fp;
    if (predicted == 0 && s.label == 1) ++fn;
    if (predicted == 0 && s.label == 0) ++tn;
  }
  return metrics_from_confusion(tp, fp, fn, tn);
}

TrainHistory train(EventModel& model, const Dataset& data, const SplitIndices& split,
                   const FeatureTable& features, const ModelConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  if (split.train.empty() || split.val.empty()) throw ValidationError("empty train or val split");
  for (int i : split.train) {
    const auto& s = data.samples[static_cast<std::size_t>(i)];
    auto violations = validate_sample(s, features_for(features, s));
    if (!violations.empty())
      throw ValidationError("sample " + s.sample_id + ": " + violations.front());
  }

  Rng rng(seed);
  AdamOptimizer opt(model.params(), cfg.learning_rate, cfg.weight_decay);

  TrainHistory history;
  double best_val = std::numeric_limits<double>::infinity();
  std::map<std::string, Mat> best_params = model.params().snapshot();
  int epochs_since_best = 0;

  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    std::vector<int> order = split.train;
    rng.shuffle(order);

    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      const double batch_n = static_cast<double>(end - start);

      try {
        Tape tape;
        Tensor batch_sum;
        for (std::size_t k = start; k < end; ++k) {
          const auto& s = data.samples[static_cast<std::size_t>(order[k])];
          Tensor loss = model.sample_loss(tape, s, features_for(features, s).h_sem, &rng, true,
                                          nullptr);
          epoch_loss += loss.scalar();
          batch_sum = k == start ? loss : add(batch_sum, loss);
        }
        Tensor batch_loss = affine(batch_sum, 1.0 / batch_n, 0.0);
        if (!std::isfinite(batch_loss.scalar()))
          throw NumericError("batch loss is not finite");
        model.params().zero_grad();
        tape.backward(batch_loss);
        opt.step();
      } catch (const NumericError& e) {
        model.params().restore(best_params);  // leave the caller a usable checkpoint
        throw NumericError("diverged at epoch " + std::to_string(epoch) + ", batch starting at " +
                           std::to_string(start) + ": " + e.what());
      }
    }
    epoch_loss /= static_cast<double>(order.size());

    EpochStats stats;
    stats.train_loss = epoch_loss;
    stats.val_loss = mean_loss(model, data, split.val, features);
    stats.val_metrics = evaluate(model, data, split.val, features);
    history.epochs.push_back(stats);

    if (stats.val_loss < best_val) {
      best_val = stats.val_loss;
      best_params = model.params().snapshot();
      history.best_epoch = epoch;
      epochs_since_best = 0;
    } else {
      ++epochs_since_best;
      if (epochs_since_best >= std::max(cfg.patience, 1)) break;
    }
  }

  model.params().restore(best_params);
  return history;
}

namespace {

Metrics metrics_mean(const std::vector<Metrics>& all) {
  Metrics m;
  const double n = static_cast<double>(all.size());
  for (const auto& x : all) {
    m.accuracy += x.accuracy / n;
    m.precision += x.precision / n;
    m.recall += x.recall / n;
    m.f1 += x.f1 / n;
    m.tp += x.tp;
    m.fp += x.fp;
    m.fn += x.fn;
    m.tn += x.tn;
  }
  return m;
}

Metrics metrics_stddev(const std::vector<Metrics>& all, const Metrics& mean) {
  Metrics sd;
  const double n = static_cast<double>(all.size());
  for (const auto& x : all) {
    sd.accuracy += (x.accuracy - mean.accuracy) * (x.accuracy - mean.accuracy) / n;
    sd.precision += (x.precision - mean.precision) * (x.precision - mean.precision) / n;
    sd.recall += (x.recall - mean.recall) * (x.recall - mean.recall) / n;
    sd.f1 += (x.f1 - mean.f1) * (x.f1 - mean.f1) / n;
  }
  sd.accuracy = std::sqrt(sd.accuracy);
  sd.precision = std::sqrt(sd.precision);
  sd.recall = std::sqrt(sd.recall);
  sd.f1 = std::sqrt(sd.f1);
  return sd;
}

int common_num_steps(const Dataset& data) {
  if (data.samples.empty()) throw ValidationError("empty dataset");
  const int t = static_cast<int>(data.samples.front().snapshots.size());
  for (const auto& s : data.samples)
    if (static_cast<int>(s.snapshots.size()) != t)
      throw ValidationError("samples disagree on snapshot count");
  return t;
}

}  // namespace

ExperimentResult run_experiment(const Dataset& data, const FeatureTable& features,
                                const ModelConfig& cfg, ModelKind kind) {
  cfg.validate();
  const int t = common_num_steps(data);
  const int d = static_cast<int>(features.vectors.cols());

  ExperimentResult result;
  for (std::uint64_t seed : cfg.seeds) {
    SplitIndices split = split_dataset(static_cast<int>(data.samples.size()), seed);
    TrainHistory history;
    Metrics test;
    if (kind == ModelKind::kDygcl) {
      DyGclModel model(cfg, d, t, seed);
      history = train(model, data, split, features, cfg, seed);
      test = evaluate(model, data, split.test, features);
    } else {
      StaticGcnBaseline model(cfg, d, seed);
      history = train(model, data, split, features, cfg, seed);
      test = evaluate(model, data, split.test, features);
    }
    result.per_seed.push_back(test);
    result.histories.push_back(std::move(history));
  }
  result.mean = metrics_mean(result.per_seed);
  result.stddev = metrics_stddev(result.per_seed, result.mean);
  return result;
}

Metrics baseline_static_gcn(const Dataset& data, const FeatureTable& features,
                            const ModelConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  common_num_steps(data);
  const int d = static_cast<int>(features.vectors.cols());
  SplitIndices split = split_dataset(static_cast<int>(data.samples.size()), seed);
  StaticGcnBaseline model(cfg, d, seed);
  train(model, data, split, features, cfg, seed);
  return evaluate(model, data, split.test, features);
}

SweepAxis sweep_axis_from_string(const std::string& s) {
  if (s == "historic_days" || s == "historic-days") return SweepAxis::kHistoricDays;
  if (s == "lead_days" || s == "lead-days") return SweepAxis::kLeadDays;
  throw ConfigError("unknown sweep axis: " + s);
}

Dataset truncate_history(const Dataset& data, int historic_days) {
  const int t = common_num_steps(data);
  if (historic_days < 1 || historic_days > t)
    throw ValidationError("historic days " + std::to_string(historic_days) +
                          " outside [1, " + std::to_string(t) + "]");
  Dataset out = data;
  for (auto& s : out.samples)
    s.snapshots.erase(s.snapshots.begin(), s.snapshots.end() - historic_days);
  return out;
}

Dataset apply_lead(const Dataset& data, int lead_days) {
  const int t = common_num_steps(data);
  if (lead_days < 1 || lead_days > t)
    throw ValidationError("lead days " + std::to_string(lead_days) + " outside [1, " +
                          std::to_string(t) + "]");
  Dataset out = data;
  for (auto& s : out.samples) s.snapshots.resize(s.snapshots.size() - (lead_days - 1));
  return out;
}

std::vector<SweepRow> sensitivity_sweep(const Dataset& data, const FeatureTable& features,
                                        const ModelConfig& cfg, SweepAxis axis,
                                        const std::vector<int>& values) {
  std::vector<SweepRow> rows;
  for (int v : values) {
    Dataset cell = axis == SweepAxis::kHistoricDays ? truncate_history(data, v)
                                                    : apply_lead(data, v);
    ExperimentResult res = run_experiment(cell, features, cfg);
    rows.push_back({v, res.mean, res.stddev});
  }
  return rows;
}

AdamOptimizer::AdamOptimizer(ParamStore& params, double lr, double weight_decay)
    : ps_(&params), lr_(lr), weight_decay_(weight_decay) {
  for (const auto& name : params.names()) {
    const Mat& v = params.value(name);
    m_[name] = Mat::Zero(v.rows(), v.cols());
    v_[name] = Mat::Zero(v.rows(), v.cols());
  }
}

void AdamOptimizer::step() {
  ++t_;
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (const auto& name : ps_->names()) {
    Mat& value = ps_->value(name);
    Mat grad = ps_->grad(name);
    if (weight_decay_ != 0.0) grad += weight_decay_ * value;
    Mat& m = m_[name];
    Mat& v = v_[name];
    m = beta1_ * m + (1.0 - beta1_) * grad;
    v = beta2_ * v + (1.0 - beta2_) * grad.cwiseProduct(grad);
    const Mat m_hat = m / bc1;
    const Mat v_hat = v / bc2;
    value -= lr_ * (m_hat.array() / (v_hat.array().sqrt() + eps_)).matrix();
  }
}

}  // namespace dygcl
