#include "dygcl/model.hpp"

#include <cmath>
#include <cstdio>

namespace dygcl {

namespace {

std::string step_name(int t, const char* field) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "local.t%02d.%s", t, field);
  return buf;
}

std::string block_name(int l, const char* field) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "global.b%02d.%s", l, field);
  return buf;
}

}  // namespace

Mat glorot_init(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
  Mat m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.uniform(-limit, limit);
  return m;
}

void ModelConfig::validate() const {
  if (embed_dim < 1) throw ConfigError("embed dim must be positive");
  if (hidden < 1) throw ConfigError("hidden size must be positive");
  if (global_width < 1) throw ConfigError("global width must be positive");
  if (pool_blocks < 1) throw ConfigError("need at least one pooling block");
  if (!(pool_ratio > 0.0 && pool_ratio <= 1.0)) throw ConfigError("pool ratio must be in (0, 1]");
  if (!(loss_weight >= 0.0 && loss_weight <= 1.0))
    throw ConfigError("loss weight must be in [0, 1]");
  if (learning_rate <= 0.0) throw ConfigError("learning rate must be positive");
  if (weight_decay < 0.0) throw ConfigError("weight decay must be non-negative");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("dropout must be in [0, 1)");
  if (mlp_hidden < 1) throw ConfigError("mlp hidden size must be positive");
  if (batch_size < 1) throw ConfigError("batch size must be positive");
  if (max_epochs < 1) throw ConfigError("max epochs must be positive");
  if (patience < 0) throw ConfigError("patience must be non-negative");
  if (seeds.empty()) throw ConfigError("seed list must not be empty");
  if (historic_days < 0) throw ConfigError("historic days must be non-negative");
  if (lead_days < 1) throw ConfigError("lead days must be at least 1");
  rnn_kind_from_string(rnn_kind);
  activation_from_string(gcn_activation);
  activation_from_string(score_activation);
}

DyGclModel::DyGclModel(const ModelConfig& cfg, int feature_dim, int num_steps,
                       std::uint64_t seed)
    : cfg_(cfg), feature_dim_(feature_dim), num_steps_(num_steps) {
  cfg_.validate();
  if (feature_dim < 1) throw ConfigError("feature dim must be positive");
  if (num_steps < 1) throw ConfigError("model needs at least one timestep");

  Rng rng(seed);
  const int d = feature_dim_;
  const int h = cfg_.hidden;
  const int g = cfg_.global_width;
  const int fused = 2 * h;

  const auto add_local_set = [&](const std::string& prefix, int in_dim) {
    ps_.add(prefix + "gcn_w", glorot_init(in_dim, h, rng));
    ps_.add(prefix + "att_ws", glorot_init(h, h, rng));
    ps_.add(prefix + "att_bs", Mat::Zero(1, h));
    ps_.add(prefix + "att_w0", glorot_init(d, h, rng));
    ps_.add(prefix + "att_b0", Mat::Zero(1, h));
  };

  if (cfg_.share_local_weights) {
    add_local_set("local.t00.", d);
    if (num_steps_ > 1) ps_.add("local.shared.gcn_w", glorot_init(fused, h, rng));
  } else {
    for (int t = 0; t < num_steps_; ++t) add_local_set(step_name(t, ""), t == 0 ? d : fused);
  }

  for (int l = 0; l < cfg_.pool_blocks; ++l) {
    const int in_dim = l == 0 ? fused : g;
    ps_.add(block_name(l, "gcn_w"), glorot_init(in_dim, g, rng));
    ps_.add(block_name(l, "att_w"), glorot_init(g, 1, rng));
  }

  const int rnn_in = 2 * g;
  const int rnn_hidden = fused;  // matches dim(Z_local) by construction
  const auto add_gate = [&](const char* gate_tag) {
    ps_.add(std::string("global.rnn.w_") + gate_tag, glorot_init(rnn_in, rnn_hidden, rng));
    ps_.add(std::string("global.rnn.u_") + gate_tag, glorot_init(rnn_hidden, rnn_hidden, rng));
    ps_.add(std::string("global.rnn.b_") + gate_tag, Mat::Zero(1, rnn_hidden));
  };
  if (rnn_kind_from_string(cfg_.rnn_kind) == RnnKind::kLstm) {
    add_gate("i");
    add_gate("f");
    add_gate("g");
    add_gate("o");
  } else {
    add_gate("z");
    add_gate("r");
    add_gate("n");
  }

  ps_.add("head.w_l", glorot_init(fused, fused, rng));
  ps_.add("head.b_l", Mat::Zero(1, fused));
  ps_.add("head.w_g", glorot_init(fused, fused, rng));
  ps_.add("head.b_g", Mat::Zero(1, fused));
  ps_.add("head.mlp_w1", glorot_init(2 * fused, cfg_.mlp_hidden, rng));
  ps_.add("head.mlp_b1", Mat::Zero(1, cfg_.mlp_hidden));
  ps_.add("head.mlp_w2", glorot_init(cfg_.mlp_hidden, 1, rng));
  ps_.add("head.mlp_b2", Mat::Zero(1, 1));
}

LocalEncoderTensors DyGclModel::bind_local(Tape& tape) {
  LocalEncoderTensors out;
  for (int t = 0; t < num_steps_; ++t) {
    LocalStepTensors step;
    if (cfg_.share_local_weights) {
      step.gcn_w = t == 0 ? ps_.use(tape, "local.t00.gcn_w")
                          : ps_.use(tape, "local.shared.gcn_w");
      step.att_ws = ps_.use(tape, "local.t00.att_ws");
      step.att_bs = ps_.use(tape, "local.t00.att_bs");
      step.att_w0 = ps_.use(tape, "local.t00.att_w0");
      step.att_b0 = ps_.use(tape, "local.t00.att_b0");
    } else {
      step.gcn_w = ps_.use(tape, step_name(t, "gcn_w"));
      step.att_ws = ps_.use(tape, step_name(t, "att_ws"));
      step.att_bs = ps_.use(tape, step_name(t, "att_bs"));
      step.att_w0 = ps_.use(tape, step_name(t, "att_w0"));
      step.att_b0 = ps_.use(tape, step_name(t, "att_b0"));
    }
    out.steps.push_back(step);
  }
  return out;
}

GlobalEncoderTensors DyGclModel::bind_global(Tape& tape) {
  GlobalEncoderTensors out;
  out.pool_ratio = cfg_.pool_ratio;
  for (int l = 0; l < cfg_.pool_blocks; ++l) {
    PoolBlockTensors block;
    block.gcn_w = ps_.use(tape, block_name(l, "gcn_w"));
    block.att_w = ps_.use(tape, block_name(l, "att_w"));
    out.blocks.push_back(block);
  }
  out.cell.kind = rnn_kind_from_string(cfg_.rnn_kind);
  const auto use = [&](const char* name) { return ps_.use(tape, name); };
  if (out.cell.kind == RnnKind::kLstm) {
    out.cell.lstm = {use("global.rnn.w_i"), use("global.rnn.u_i"), use("global.rnn.b_i"),
                     use("global.rnn.w_f"), use("global.rnn.u_f"), use("global.rnn.b_f"),
                     use("global.rnn.w_g"), use("global.rnn.u_g"), use("global.rnn.b_g"),
                     use("global.rnn.w_o"), use("global.rnn.u_o"), use("global.rnn.b_o")};
  } else {
    out.cell.gru = {use("global.rnn.w_z"), use("global.rnn.u_z"), use("global.rnn.b_z"),
                    use("global.rnn.w_r"), use("global.rnn.u_r"), use("global.rnn.b_r"),
                    use("global.rnn.w_n"), use("global.rnn.u_n"), use("global.rnn.b_n")};
  }
  return out;
}

HeadTensors DyGclModel::bind_head(Tape& tape) {
  HeadTensors head;
  head.w_l = ps_.use(tape, "head.w_l");
  head.b_l = ps_.use(tape, "head.b_l");
  head.w_g = ps_.use(tape, "head.w_g");
  head.b_g = ps_.use(tape, "head.b_g");
  head.mlp_w1 = ps_.use(tape, "head.mlp_w1");
  head.mlp_b1 = ps_.use(tape, "head.mlp_b1");
  head.mlp_w2 = ps_.use(tape, "head.mlp_w2");
  head.mlp_b2 = ps_.use(tape, "head.mlp_b2");
  return head;
}

DyGclModel::Forward DyGclModel::forward(Tape& tape, const DynamicGraphSample& s,
                                        const Mat& h_sem, Rng* rng, bool training) {
  if (static_cast<int>(s.snapshots.size()) != num_steps_)
    throw ShapeError("sample has " + std::to_string(s.snapshots.size()) +
                     " snapshots, model was built for " + std::to_string(num_steps_));
  if (h_sem.rows() != s.num_nodes || h_sem.cols() != feature_dim_)
    throw ShapeError("feature matrix must be num_nodes x feature_dim");

  Tensor features = tape.leaf(h_sem);

  LocalForwardOptions local_opts;
  local_opts.gcn_act = activation_from_string(cfg_.gcn_activation);
  local_opts.dropout_rate = cfg_.dropout;
  local_opts.rng = rng;
  local_opts.training = training;
  LocalForwardResult local = local_forward(s, features, bind_local(tape), local_opts);

  GlobalForwardOptions global_opts;
  global_opts.gcn_act = local_opts.gcn_act;
  global_opts.score_act = activation_from_string(cfg_.score_activation);
  global_opts.dropout_rate = cfg_.dropout;
  global_opts.rng = rng;
  global_opts.training = training;
  GlobalForwardResult global = global_forward(s, local.h_l, bind_global(tape), global_opts);

  Forward out;
  out.z_local = local.z_local;
  out.z_global = global.z_global;
  out.traces = std::move(global.traces);
  out.l_contra = contrastive_loss(out.z_local, out.z_global);

  HeadTensors head = bind_head(tape);
  out.z_final = fuse(out.z_local, out.z_global, head);
  out.y_hat = predict(out.z_final, head);
  out.l_sup = supervised_loss(out.y_hat, s.label);
  out.total = cfg_.use_contrastive ? total_loss(out.l_sup, out.l_contra, cfg_.loss_weight)
                                   : out.l_sup;
  return out;
}

Tensor DyGclModel::sample_loss(Tape& tape, const DynamicGraphSample& s, const Mat& h_sem,
                               Rng* rng, bool training, double* y_hat) {
  Forward f = forward(tape, s, h_sem, rng, training);
  if (y_hat) *y_hat = f.y_hat.scalar();
  return f.total;
}

StaticGcnBaseline::StaticGcnBaseline(const ModelConfig& cfg, int feature_dim, std::uint64_t seed)
    : cfg_(cfg), feature_dim_(feature_dim) {
  cfg_.validate();
  Rng rng(seed);
  const int h = cfg_.hidden;
  ps_.add("baseline.gcn1_w", glorot_init(feature_dim_, h, rng));
  ps_.add("baseline.gcn2_w", glorot_init(h, h, rng));
  ps_.add("baseline.out_w", glorot_init(h, 1, rng));
  ps_.add("baseline.out_b", Mat::Zero(1, 1));
}

Tensor StaticGcnBaseline::sample_loss(Tape& tape, const DynamicGraphSample& s, const Mat& h_sem,
                                      Rng* rng, bool training, double* y_hat) {
  if (h_sem.rows() != s.num_nodes || h_sem.cols() != feature_dim_)
    throw ShapeError("feature matrix must be num_nodes x feature_dim");

  const NormalizedAdjacency ahat = normalize_adjacency(union_snapshots(s));
  const Activation act = activation_from_string(cfg_.gcn_activation);
  const bool drop = training && cfg_.dropout > 0.0 && rng != nullptr;

  Tensor h = gcn_layer(ahat, tape.leaf(h_sem), ps_.use(tape, "baseline.gcn1_w"), act);
  if (drop) h = dropout(h, cfg_.dropout, *rng, true);
  h = gcn_layer(ahat, h, ps_.use(tape, "baseline.gcn2_w"), act);
  if (drop) h = dropout(h, cfg_.dropout, *rng, true);

  Tensor logit = add(matmul(row_mean(h), ps_.use(tape, "baseline.out_w")),
                     ps_.use(tape, "baseline.out_b"));
  Tensor prob = clamp(sigmoid(logit), 1e-7, 1.0 - 1e-7);
  if (y_hat) *y_hat = prob.scalar();
  return supervised_loss(prob, s.label);
}

}  // namespace dygcl
