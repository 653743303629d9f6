#pragma once

#include <vector>

#include "dygcl/ops.hpp"

namespace dygcl {

// Per-timestep parameters already placed on a tape. The GCN weight for the
// first step is d x h; later steps consume the 2h-wide fused output.
struct LocalStepTensors {
  Tensor gcn_w;   // in_t x h
  Tensor att_ws;  // h x h
  Tensor att_bs;  // 1 x h
  Tensor att_w0;  // d x h
  Tensor att_b0;  // 1 x h
};

struct LocalEncoderTensors {
  std::vector<LocalStepTensors> steps;  // one per timestep
};

struct LocalForwardOptions {
  Activation gcn_act = Activation::kRelu;
  double dropout_rate = 0.0;
  Rng* rng = nullptr;
  bool training = false;
};

// act(Ahat * H * weight)
Tensor gcn_layer(const NormalizedAdjacency& ahat, Tensor h, Tensor weight,
                 Activation act = Activation::kRelu);

// tanh([H_t W_s + b_s || H_sem W_0 + b_0]); re-injects semantic features so
// repeated neighborhood averaging does not wash them out.
Tensor temporal_attention(Tensor h_t, Tensor h_sem, const LocalStepTensors& p);

struct LocalForwardResult {
  Tensor z_local;  // 1 x 2h
  Tensor h_l;      // N x 2h
};

// Runs GCN + temporal attention over all snapshots starting from H_sem, then
// mean-pools the final node matrix.
LocalForwardResult local_forward(const DynamicGraphSample& sample, Tensor h_sem,
                                 const LocalEncoderTensors& params,
                                 const LocalForwardOptions& opts = {});

}  // namespace dygcl
