#include "dygcl/local_encoder.hpp"

namespace dygcl {

Tensor gcn_layer(const NormalizedAdjacency& ahat, Tensor h, Tensor weight, Activation act) {
  return apply_activation(matmul(spmm(ahat, h), weight), act);
}

Tensor temporal_attention(Tensor h_t, Tensor h_sem, const LocalStepTensors& p) {
  if (h_t.rows() != h_sem.rows())
    throw ShapeError("temporal_attention: row counts differ (" + std::to_string(h_t.rows()) +
                     " vs " + std::to_string(h_sem.rows()) + ")");
  Tensor current = add_bias(matmul(h_t, p.att_ws), p.att_bs);
  Tensor semantic = add_bias(matmul(h_sem, p.att_w0), p.att_b0);
  return tanh(concat_cols(current, semantic));
}

LocalForwardResult local_forward(const DynamicGraphSample& sample, Tensor h_sem,
                                 const LocalEncoderTensors& params,
                                 const LocalForwardOptions& opts) {
  if (params.steps.size() != sample.snapshots.size())
    throw ShapeError("local_forward: " + std::to_string(params.steps.size()) +
                     " step params for " + std::to_string(sample.snapshots.size()) +
                     " snapshots");
  if (h_sem.rows() != sample.num_nodes)
    throw ShapeError("local_forward: feature rows do not match node count");

  const bool drop = opts.training && opts.dropout_rate > 0.0 && opts.rng != nullptr;
  Tensor h = h_sem;
  for (std::size_t t = 0; t < sample.snapshots.size(); ++t) {
    const NormalizedAdjacency ahat = normalize_adjacency(sample.snapshots[t]);
    Tensor conv = gcn_layer(ahat, h, params.steps[t].gcn_w, opts.gcn_act);
    if (drop) conv = dropout(conv, opts.dropout_rate, *opts.rng, true);
    h = temporal_attention(conv, h_sem, params.steps[t]);
    if (drop) h = dropout(h, opts.dropout_rate, *opts.rng, true);
  }
  return {row_mean(h), h};
}

}  // namespace dygcl
