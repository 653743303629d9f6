#pragma once

#include <string>
#include <vector>

#include "dygcl/ops.hpp"

namespace dygcl {

struct PoolBlockTensors {
  Tensor gcn_w;  // in_l x g
  Tensor att_w;  // g x 1
};

enum class RnnKind { kLstm, kGru };
RnnKind rnn_kind_from_string(const std::string& s);

// Gate parameters; input width 2g (readout), hidden width 2h so the global
// vector matches the local one.
struct LstmTensors {
  Tensor w_i, u_i, b_i;
  Tensor w_f, u_f, b_f;
  Tensor w_g, u_g, b_g;
  Tensor w_o, u_o, b_o;
};

struct GruTensors {
  Tensor w_z, u_z, b_z;
  Tensor w_r, u_r, b_r;
  Tensor w_n, u_n, b_n;
};

struct RecurrentTensors {
  RnnKind kind = RnnKind::kLstm;
  LstmTensors lstm;
  GruTensors gru;
};

struct GlobalEncoderTensors {
  std::vector<PoolBlockTensors> blocks;
  RecurrentTensors cell;
  double pool_ratio = 0.5;
};

struct GlobalForwardOptions {
  Activation gcn_act = Activation::kRelu;
  Activation score_act = Activation::kTanh;
  double dropout_rate = 0.0;
  Rng* rng = nullptr;
  bool training = false;
};

// S = act(Ahat * H * theta_att), one score per node.
Tensor attention_scores(Tensor h, const NormalizedAdjacency& ahat, Tensor theta_att,
                        Activation act = Activation::kTanh);

// Indices of the k = max(1, ceil(ratio*n)) largest scores; ties keep the
// smaller node index; result sorted ascending.
std::vector<int> topk_select(const Mat& scores, double ratio, int n);

struct PoolBlockResult {
  SparseAdjacency coarse;
  Tensor pooled;         // k x g, gated by the selected scores
  std::vector<int> idx;  // into the block's input numbering
  Mat scores;            // all input-node scores
};

PoolBlockResult pool_block(const SparseAdjacency& a, Tensor h, const PoolBlockTensors& p,
                           double ratio, const GlobalForwardOptions& opts = {});

// [mean || max] over rows.
Tensor readout(Tensor h);

// Runs the configured cell left to right from zero state; returns the final
// hidden state.
Tensor recurrent_aggregate(const std::vector<Tensor>& inputs, const RecurrentTensors& cell);

// Selected nodes per snapshot and block, in the sample's original numbering.
struct PooledTrace {
  int snapshot = 0;
  int block = 0;
  std::vector<int> original_idx;
  std::vector<double> scores;  // of the selected nodes
  SparseAdjacency coarse;      // in block-local numbering
};

struct GlobalForwardResult {
  Tensor z_global;  // 1 x 2h
  std::vector<PooledTrace> traces;
};

// Per snapshot: L pooling blocks starting from (A_t, H_L), readout after the
// final block; then the recurrent cell over the T snapshot vectors.
GlobalForwardResult global_forward(const DynamicGraphSample& sample, Tensor h_l,
                                   const GlobalEncoderTensors& params,
                                   const GlobalForwardOptions& opts = {});

}  // namespace dygcl
