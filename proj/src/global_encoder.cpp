#include "dygcl/global_encoder.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dygcl/local_encoder.hpp"

namespace dygcl {

RnnKind rnn_kind_from_string(const std::string& s) {
  if (s == "lstm") return RnnKind::kLstm;
  if (s == "gru") return RnnKind::kGru;
  throw ConfigError("unknown rnn kind: " + s + " (expected lstm or gru)");
}

Tensor attention_scores(Tensor h, const NormalizedAdjacency& ahat, Tensor theta_att,
                        Activation act) {
  if (theta_att.cols() != 1)
    throw ShapeError("attention_scores: theta_att must have one column");
  return apply_activation(matmul(spmm(ahat, h), theta_att), act);
}

std::vector<int> topk_select(const Mat& scores, double ratio, int n) {
  if (n < 1) throw ValidationError("topk_select: need at least one node");
  if (!(ratio > 0.0 && ratio <= 1.0)) throw ConfigError("pooling ratio must be in (0, 1]");
  if (scores.rows() != n || scores.cols() != 1)
    throw ShapeError("topk_select: scores must be " + std::to_string(n) + "x1");

  int k = std::max(1, static_cast<int>(std::ceil(ratio * n)));
  k = std::min(k, n);

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (scores(a, 0) != scores(b, 0)) return scores(a, 0) > scores(b, 0);
    return a < b;
  });
  order.resize(static_cast<std::size_t>(k));
  std::sort(order.begin(), order.end());
  return order;
}

PoolBlockResult pool_block(const SparseAdjacency& a, Tensor h, const PoolBlockTensors& p,
                           double ratio, const GlobalForwardOptions& opts) {
  const NormalizedAdjacency ahat = normalize_adjacency(a);
  Tensor transformed = gcn_layer(ahat, h, p.gcn_w, opts.gcn_act);
  if (opts.training && opts.dropout_rate > 0.0 && opts.rng != nullptr)
    transformed = dropout(transformed, opts.dropout_rate, *opts.rng, true);

  Tensor scores = attention_scores(transformed, ahat, p.att_w, opts.score_act);
  std::vector<int> idx = topk_select(scores.value(), ratio, a.num_nodes);

  // Score gating keeps the attention weights on the gradient path; bare
  // index selection would leave them untrained.
  Tensor pooled = scale_rows(gather_rows(transformed, idx), gather_rows(scores, idx));

  PoolBlockResult out;
  out.coarse = induced_subgraph(a, idx);
  out.pooled = pooled;
  out.idx = std::move(idx);
  out.scores = scores.value();
  return out;
}

Tensor readout(Tensor h) {
  if (h.rows() < 1) throw ShapeError("readout on an empty matrix");
  return concat_cols(row_mean(h), col_max(h));
}

namespace {

Tensor gate(Tensor x, Tensor h, Tensor w, Tensor u, Tensor b) {
  return add(add(matmul(x, w), matmul(h, u)), b);
}

}  // namespace

Tensor recurrent_aggregate(const std::vector<Tensor>& inputs, const RecurrentTensors& cell) {
  if (inputs.empty()) throw ShapeError("recurrent_aggregate: empty input sequence");
  Tape& tape = *inputs.front().tape;

  if (cell.kind == RnnKind::kLstm) {
    const Eigen::Index hidden = cell.lstm.w_i.cols();
    Tensor h = tape.leaf(Mat::Zero(1, hidden));
    Tensor c = tape.leaf(Mat::Zero(1, hidden));
    for (Tensor x : inputs) {
      Tensor i = sigmoid(gate(x, h, cell.lstm.w_i, cell.lstm.u_i, cell.lstm.b_i));
      Tensor f = sigmoid(gate(x, h, cell.lstm.w_f, cell.lstm.u_f, cell.lstm.b_f));
      Tensor g = tanh(gate(x, h, cell.lstm.w_g, cell.lstm.u_g, cell.lstm.b_g));
      Tensor o = sigmoid(gate(x, h, cell.lstm.w_o, cell.lstm.u_o, cell.lstm.b_o));
      c = add(hadamard(f, c), hadamard(i, g));
      h = hadamard(o, tanh(c));
    }
    return h;
  }

  const Eigen::Index hidden = cell.gru.w_z.cols();
  Tensor h = tape.leaf(Mat::Zero(1, hidden));
  for (Tensor x : inputs) {
    Tensor z = sigmoid(gate(x, h, cell.gru.w_z, cell.gru.u_z, cell.gru.b_z));
    Tensor r = sigmoid(gate(x, h, cell.gru.w_r, cell.gru.u_r, cell.gru.b_r));
    Tensor n = tanh(add(add(matmul(x, cell.gru.w_n), hadamard(r, matmul(h, cell.gru.u_n))),
                        cell.gru.b_n));
    h = add(hadamard(affine(z, -1.0, 1.0), n), hadamard(z, h));
  }
  return h;
}

GlobalForwardResult global_forward(const DynamicGraphSample& sample, Tensor h_l,
                                   const GlobalEncoderTensors& params,
                                   const GlobalForwardOptions& opts) {
  if (params.blocks.empty()) throw ConfigError("global encoder needs at least one pooling block");
  if (h_l.rows() != sample.num_nodes)
    throw ShapeError("global_forward: H_L rows do not match node count");

  GlobalForwardResult out;
  std::vector<Tensor> snapshot_vectors;
  snapshot_vectors.reserve(sample.snapshots.size());

  for (std::size_t t = 0; t < sample.snapshots.size(); ++t) {
    SparseAdjacency current = sample.snapshots[t];
    Tensor h = h_l;
    std::vector<int> original(static_cast<std::size_t>(sample.num_nodes));
    std::iota(original.begin(), original.end(), 0);

    for (std::size_t l = 0; l < params.blocks.size(); ++l) {
      PoolBlockResult block = pool_block(current, h, params.blocks[l], params.pool_ratio, opts);

      PooledTrace trace;
      trace.snapshot = static_cast<int>(t);
      trace.block = static_cast<int>(l);
      for (int i : block.idx) {
        trace.original_idx.push_back(original[static_cast<std::size_t>(i)]);
        trace.scores.push_back(block.scores(i, 0));
      }
      trace.coarse = block.coarse;
      out.traces.push_back(std::move(trace));

      std::vector<int> next_original;
      for (int i : block.idx) next_original.push_back(original[static_cast<std::size_t>(i)]);
      original = std::move(next_original);
      current = block.coarse;
      h = block.pooled;
    }
    snapshot_vectors.push_back(readout(h));
  }

  out.z_global = recurrent_aggregate(snapshot_vectors, params.cell);
  return out;
}

}  // namespace dygcl
