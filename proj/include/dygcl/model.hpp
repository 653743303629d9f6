#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dygcl/global_encoder.hpp"
#include "dygcl/local_encoder.hpp"
#include "dygcl/objective.hpp"

namespace dygcl {

// Every hyperparameter and architectural switch.
struct ModelConfig {
  int embed_dim = 100;   // d
  int hidden = 32;       // h (local); the fused width is 2h
  int global_width = 32; // g (pooling block width)
  int pool_blocks = 2;   // L
  double pool_ratio = 0.5;
  std::string rnn_kind = "lstm";
  double loss_weight = 0.5;  // weight on the supervised term
  bool use_contrastive = true;
  double learning_rate = 1e-3;
  double weight_decay = 1e-4;
  double dropout = 0.2;
  int mlp_hidden = 32;
  std::string gcn_activation = "relu";
  std::string score_activation = "tanh";
  bool share_local_weights = false;
  int batch_size = 32;
  int max_epochs = 200;
  int patience = 50;
  std::vector<std::uint64_t> seeds = {1};
  int historic_days = 0;  // 0 = use every snapshot
  int lead_days = 1;

  // Search ranges kept alongside the defaults; nothing sweeps them
  // automatically.
  std::vector<double> lr_grid = {1e-2, 5e-2, 1e-3, 5e-3, 1e-4, 5e-4};
  std::vector<double> weight_decay_grid = {1e-2, 1e-3, 1e-4, 1e-5};
  std::vector<int> hidden_grid = {16, 32, 64, 128};
  std::vector<double> pool_ratio_grid = {0.5, 0.25};

  void validate() const;  // throws ConfigError
};

// What the trainer needs from a model.
class EventModel {
 public:
  virtual ~EventModel() = default;
  virtual ParamStore& params() = 0;
  virtual const ParamStore& params() const = 0;
  // Scalar training loss for one sample; y_hat (when non-null) receives the
  // predicted probability.
  virtual Tensor sample_loss(Tape& tape, const DynamicGraphSample& s, const Mat& h_sem,
                             Rng* rng, bool training, double* y_hat) = 0;
};

// Both view encoders, the contrastive term and the prediction head.
class DyGclModel : public EventModel {
 public:
  struct Forward {
    Tensor z_local, z_global, z_final, y_hat;
    Tensor l_sup, l_contra, total;
    std::vector<PooledTrace> traces;
  };

  DyGclModel(const ModelConfig& cfg, int feature_dim, int num_steps, std::uint64_t seed);

  ParamStore& params() override { return ps_; }
  const ParamStore& params() const override { return ps_; }
  int num_steps() const { return num_steps_; }
  int feature_dim() const { return feature_dim_; }
  const ModelConfig& config() const { return cfg_; }

  Forward forward(Tape& tape, const DynamicGraphSample& s, const Mat& h_sem, Rng* rng,
                  bool training);

  Tensor sample_loss(Tape& tape, const DynamicGraphSample& s, const Mat& h_sem, Rng* rng,
                     bool training, double* y_hat) override;

 private:
  LocalEncoderTensors bind_local(Tape& tape);
  GlobalEncoderTensors bind_global(Tape& tape);
  HeadTensors bind_head(Tape& tape);

  ModelConfig cfg_;
  int feature_dim_;
  int num_steps_;
  ParamStore ps_;
};

// Reference point: all snapshots collapsed into one union graph, two GCN
// layers, mean pooling, sigmoid head.
class StaticGcnBaseline : public EventModel {
 public:
  StaticGcnBaseline(const ModelConfig& cfg, int feature_dim, std::uint64_t seed);

  ParamStore& params() override { return ps_; }
  const ParamStore& params() const override { return ps_; }

  Tensor sample_loss(Tape& tape, const DynamicGraphSample& s, const Mat& h_sem, Rng* rng,
                     bool training, double* y_hat) override;

 private:
  ModelConfig cfg_;
  int feature_dim_;
  ParamStore ps_;
};

// Uniform Glorot range +-sqrt(6/(fan_in+fan_out)).
Mat glorot_init(Eigen::Index rows, Eigen::Index cols, Rng& rng);

}  // namespace dygcl
