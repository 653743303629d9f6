#include <doctest.h>

#include <cmath>

#include "dygcl/grad_check.hpp"
#include "dygcl/global_encoder.hpp"
#include "dygcl/local_encoder.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace dygcl;

namespace {

struct DenseGlobalParams {
  std::vector<Mat> block_w;
  std::vector<Mat> block_att;
  Mat w_i, u_i, b_i, w_f, u_f, b_f, w_g, u_g, b_g, w_o, u_o, b_o;
  double ratio = 0.5;
};

DenseGlobalParams random_dense_params(int in_dim, int g, int hidden, int blocks, Rng& rng) {
  DenseGlobalParams p;
  for (int l = 0; l < blocks; ++l) {
    p.block_w.push_back(testing::random_mat(l == 0 ? in_dim : g, g, rng));
    p.block_att.push_back(testing::random_mat(g, 1, rng));
  }
  const int rnn_in = 2 * g;
  p.w_i = testing::random_mat(rnn_in, hidden, rng);
  p.u_i = testing::random_mat(hidden, hidden, rng);
  p.b_i = testing::random_mat(1, hidden, rng);
  p.w_f = testing::random_mat(rnn_in, hidden, rng);
  p.u_f = testing::random_mat(hidden, hidden, rng);
  p.b_f = testing::random_mat(1, hidden, rng);
  p.w_g = testing::random_mat(rnn_in, hidden, rng);
  p.u_g = testing::random_mat(hidden, hidden, rng);
  p.b_g = testing::random_mat(1, hidden, rng);
  p.w_o = testing::random_mat(rnn_in, hidden, rng);
  p.u_o = testing::random_mat(hidden, hidden, rng);
  p.b_o = testing::random_mat(1, hidden, rng);
  return p;
}

// Straight-line dense re-composition of the whole global path, kept free of
// the tape machinery: plain Eigen ops and the sort/submatrix oracles.
Mat global_forward_dense(const DynamicGraphSample& s, const Mat& h_l,
                         const DenseGlobalParams& p) {
  const auto sig = [](const Mat& x) {
    return Mat(x.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); }));
  };

  std::vector<Mat> snapshot_vectors;
  for (const auto& snap : s.snapshots) {
    Mat a = snap.dense();
    Mat h = h_l;
    for (std::size_t l = 0; l < p.block_w.size(); ++l) {
      const Mat ahat = oracle::normalize_dense(a);
      const Mat ht = (ahat * h * p.block_w[l]).cwiseMax(0.0);
      const Mat scores = (ahat * ht * p.block_att[l]).array().tanh().matrix();
      std::vector<double> svec(static_cast<std::size_t>(scores.rows()));
      for (Eigen::Index i = 0; i < scores.rows(); ++i) svec[static_cast<std::size_t>(i)] = scores(i, 0);
      const int k = std::max(1, static_cast<int>(std::ceil(p.ratio * static_cast<double>(a.rows()))));
      const auto idx = oracle::topk_sort(svec, std::min<int>(k, static_cast<int>(a.rows())));

      Mat pooled(static_cast<Eigen::Index>(idx.size()), ht.cols());
      for (std::size_t r = 0; r < idx.size(); ++r)
        pooled.row(static_cast<Eigen::Index>(r)) = ht.row(idx[r]) * scores(idx[r], 0);
      a = oracle::submatrix_dense(a, idx);
      h = pooled;
    }
    Mat z(1, 2 * h.cols());
    z.leftCols(h.cols()) = h.colwise().mean();
    z.rightCols(h.cols()) = h.colwise().maxCoeff();
    snapshot_vectors.push_back(z);
  }

  Mat hh = Mat::Zero(1, p.u_i.rows());
  Mat cc = Mat::Zero(1, p.u_i.rows());
  for (const Mat& x : snapshot_vectors) {
    const Mat i = sig(x * p.w_i + hh * p.u_i + p.b_i);
    const Mat f = sig(x * p.w_f + hh * p.u_f + p.b_f);
    const Mat g = (x * p.w_g + hh * p.u_g + p.b_g).array().tanh().matrix();
    const Mat o = sig(x * p.w_o + hh * p.u_o + p.b_o);
    cc = f.cwiseProduct(cc) + i.cwiseProduct(g);
    hh = o.cwiseProduct(cc.array().tanh().matrix());
  }
  return hh;
}

GlobalEncoderTensors bind_dense_params(Tape& tape, const DenseGlobalParams& p) {
  GlobalEncoderTensors out;
  out.pool_ratio = p.ratio;
  for (std::size_t l = 0; l < p.block_w.size(); ++l)
    out.blocks.push_back({tape.leaf(p.block_w[l], true), tape.leaf(p.block_att[l], true)});
  out.cell.kind = RnnKind::kLstm;
  out.cell.lstm = {tape.leaf(p.w_i, true), tape.leaf(p.u_i, true), tape.leaf(p.b_i, true),
                   tape.leaf(p.w_f, true), tape.leaf(p.u_f, true), tape.leaf(p.b_f, true),
                   tape.leaf(p.w_g, true), tape.leaf(p.u_g, true), tape.leaf(p.b_g, true),
                   tape.leaf(p.w_o, true), tape.leaf(p.u_o, true), tape.leaf(p.b_o, true)};
  return out;
}

}  // namespace

TEST_CASE("attention_scores frozen cases") {
  Tape t;
  {
    auto norm = normalize_adjacency(make_adjacency(3, {{0, 1}, {1, 2}}));
    Tensor h = t.leaf(Mat::Ones(3, 2));
    Tensor att = t.leaf(Mat::Zero(2, 1));
    CHECK(attention_scores(h, norm, att).value().cwiseAbs().maxCoeff() == 0.0);
  }
  {
    auto norm = normalize_adjacency(make_adjacency(1, {}));
    Tensor h = t.leaf(Mat::Ones(1, 1));
    Tensor att = t.leaf(Mat::Constant(1, 1, 0.5));
    CHECK(attention_scores(h, norm, att).scalar() ==
          doctest::Approx(std::tanh(0.5)).epsilon(1e-15));
  }
}

TEST_CASE("attention_scores invariant under matched column permutation") {
  Rng rng(41);
  auto norm = normalize_adjacency(make_adjacency(4, {{0, 1}, {1, 2}, {2, 3}}));
  Mat h = testing::random_mat(4, 3, rng);
  Mat att = testing::random_mat(3, 1, rng);

  std::vector<int> perm = {2, 0, 1};
  Mat h_p(4, 3), att_p(3, 1);
  for (int j = 0; j < 3; ++j) {
    h_p.col(perm[static_cast<std::size_t>(j)]) = h.col(j);
    att_p(perm[static_cast<std::size_t>(j)], 0) = att(j, 0);
  }

  Tape t;
  Mat base = attention_scores(t.leaf(h), norm, t.leaf(att)).value();
  Mat moved = attention_scores(t.leaf(h_p), norm, t.leaf(att_p)).value();
  CHECK((base - moved).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("topk_select frozen cases") {
  {
    Mat s(3, 1);
    s << 0.9, 0.1, 0.5;
    CHECK(topk_select(s, 0.5, 3) == std::vector<int>{0, 2});
  }
  {
    Mat s(3, 1);
    s << 0.5, 0.5, 0.1;
    CHECK(topk_select(s, 2.0 / 3.0, 3) == std::vector<int>{0, 1});
  }
  {
    Mat s(3, 1);
    s << 0.1, 0.9, 0.5;
    CHECK(topk_select(s, 0.01, 3) == std::vector<int>{1});
  }
  Mat s(2, 1);
  s << 1.0, 0.0;
  CHECK_THROWS_AS(topk_select(s, 0.0, 2), ConfigError);
  CHECK_THROWS_AS(topk_select(s, 1.5, 2), ConfigError);
}

TEST_CASE("topk_select agrees with the stable-sort oracle on 1000 random vectors") {
  Rng rng(42);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = rng.uniform_int(1, 50);
    std::vector<double> scores(static_cast<std::size_t>(n));
    Mat s(n, 1);
    for (int i = 0; i < n; ++i) {
      // coarse values make ties common
      scores[static_cast<std::size_t>(i)] = rng.uniform_int(0, 5) * 0.25;
      s(i, 0) = scores[static_cast<std::size_t>(i)];
    }
    const double ratio = rng.uniform(0.05, 1.0);
    const int k = std::min(n, std::max(1, static_cast<int>(std::ceil(ratio * n))));
    CHECK(topk_select(s, ratio, n) == oracle::topk_sort(scores, k));
  }
}

TEST_CASE("pool_block: ratio 1 keeps everything, scaled by scores") {
  Rng rng(43);
  auto a = make_adjacency(4, {{0, 1}, {1, 2}, {2, 3}});
  Tape tape;
  PoolBlockTensors p{tape.leaf(testing::random_mat(3, 2, rng)),
                     tape.leaf(testing::random_mat(2, 1, rng))};
  Tensor h = tape.leaf(testing::random_mat(4, 3, rng));

  auto out = pool_block(a, h, p, 1.0);
  CHECK(out.idx == std::vector<int>{0, 1, 2, 3});
  CHECK((out.coarse.dense() - a.dense()).cwiseAbs().maxCoeff() == 0.0);

  const NormalizedAdjacency ahat = normalize_adjacency(a);
  Tape check;
  Tensor ht = gcn_layer(ahat, check.leaf(h.value()), check.leaf(p.gcn_w.value()));
  Tensor sc = attention_scores(ht, ahat, check.leaf(p.att_w.value()));
  Mat expected = ht.value().array().colwise() * sc.value().col(0).array();
  CHECK((out.pooled.value() - expected).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("pool_block: a dominant star center survives k=1 pooling") {
  auto a = make_adjacency(4, {{0, 1}, {0, 2}, {0, 3}});
  Tape tape;
  // one feature channel; center has by far the largest feature value
  Mat h(4, 1);
  h << 5.0, 0.1, 0.1, 0.1;
  PoolBlockTensors p{tape.leaf(Mat::Identity(1, 1)), tape.leaf(Mat::Identity(1, 1))};
  auto out = pool_block(a, tape.leaf(h), p, 0.25);
  CHECK(out.idx == std::vector<int>{0});
  CHECK(out.coarse.num_nodes == 1);
  CHECK(out.coarse.edges.empty());
}

TEST_CASE("pool_block: zero attention weights keep the lowest k indices") {
  Rng rng(44);
  auto a = make_adjacency(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}});
  Tape tape;
  PoolBlockTensors p{tape.leaf(testing::random_mat(2, 2, rng)), tape.leaf(Mat::Zero(2, 1))};
  auto out = pool_block(a, tape.leaf(testing::random_mat(5, 2, rng)), p, 0.4);
  CHECK(out.idx == std::vector<int>{0, 1});
  CHECK(out.scores.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("readout frozen cases and row-permutation invariance") {
  Tape t;
  {
    Tensor h = t.leaf((Mat(2, 2) << 1, 3, 3, 1).finished());
    Mat z = readout(h).value();
    CHECK(z(0, 0) == 2.0);
    CHECK(z(0, 1) == 2.0);
    CHECK(z(0, 2) == 3.0);
    CHECK(z(0, 3) == 3.0);
  }
  {
    Tensor h = t.leaf((Mat(1, 2) << 5, 7).finished());
    Mat z = readout(h).value();
    CHECK(z(0, 0) == 5.0);
    CHECK(z(0, 1) == 7.0);
    CHECK(z(0, 2) == 5.0);
    CHECK(z(0, 3) == 7.0);
  }
  Rng rng(45);
  Mat h = testing::random_mat(5, 3, rng);
  Mat rev(5, 3);
  for (int i = 0; i < 5; ++i) rev.row(4 - i) = h.row(i);
  CHECK((readout(t.leaf(h)).value() - readout(t.leaf(rev)).value()).cwiseAbs().maxCoeff() <
        1e-12);
}

TEST_CASE("recurrent cells: zero parameters force a zero final state") {
  for (const char* kind : {"lstm", "gru"}) {
    Tape tape;
    RecurrentTensors cell;
    cell.kind = rnn_kind_from_string(kind);
    const auto z = [&](Eigen::Index r, Eigen::Index c) { return tape.leaf(Mat::Zero(r, c)); };
    if (cell.kind == RnnKind::kLstm)
      cell.lstm = {z(2, 3), z(3, 3), z(1, 3), z(2, 3), z(3, 3), z(1, 3),
                   z(2, 3), z(3, 3), z(1, 3), z(2, 3), z(3, 3), z(1, 3)};
    else
      cell.gru = {z(2, 3), z(3, 3), z(1, 3), z(2, 3), z(3, 3), z(1, 3),
                  z(2, 3), z(3, 3), z(1, 3)};

    Rng rng(46);
    std::vector<Tensor> inputs = {tape.leaf(testing::random_mat(1, 2, rng)),
                                  tape.leaf(testing::random_mat(1, 2, rng))};
    CHECK(recurrent_aggregate(inputs, cell).value().cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("recurrent cells: unit-weight scalar steps match the gate-equation oracle") {
  Tape tape;
  const auto one = [&] { return tape.leaf(Mat::Ones(1, 1)); };
  const auto zero = [&] { return tape.leaf(Mat::Zero(1, 1)); };

  {
    RecurrentTensors cell;
    cell.kind = RnnKind::kLstm;
    cell.lstm = {one(), one(), zero(), one(), one(), zero(),
                 one(), one(), zero(), one(), one(), zero()};
    std::vector<Tensor> inputs = {tape.leaf(Mat::Ones(1, 1))};
    const double got = recurrent_aggregate(inputs, cell).scalar();
    const auto expect = oracle::lstm_step_1d(1.0, {}, 1.0, 1.0, 0.0);
    CHECK(std::abs(got - expect.h) < 1e-12);
    // the same value written out longhand
    const double sig1 = 1.0 / (1.0 + std::exp(-1.0));
    CHECK(std::abs(got - sig1 * std::tanh(sig1 * std::tanh(1.0))) < 1e-12);

    // two steps, still against the scalar oracle
    std::vector<Tensor> two = {tape.leaf(Mat::Ones(1, 1)), tape.leaf(Mat::Constant(1, 1, 0.5))};
    const double got2 = recurrent_aggregate(two, cell).scalar();
    auto st = oracle::lstm_step_1d(1.0, {}, 1.0, 1.0, 0.0);
    st = oracle::lstm_step_1d(0.5, st, 1.0, 1.0, 0.0);
    CHECK(std::abs(got2 - st.h) < 1e-12);
  }
  {
    RecurrentTensors cell;
    cell.kind = RnnKind::kGru;
    cell.gru = {one(), one(), zero(), one(), one(), zero(), one(), one(), zero()};
    std::vector<Tensor> inputs = {tape.leaf(Mat::Ones(1, 1))};
    const double got = recurrent_aggregate(inputs, cell).scalar();
    CHECK(std::abs(got - oracle::gru_step_1d(1.0, 0.0, 1.0, 1.0, 0.0)) < 1e-12);
  }
}

TEST_CASE("recurrent_aggregate with one step equals a single cell application") {
  Rng rng(47);
  DenseGlobalParams p = random_dense_params(4, 2, 3, 1, rng);
  Mat x = testing::random_mat(1, 4, rng);

  Tape tape;
  GlobalEncoderTensors g = bind_dense_params(tape, p);
  Tensor xt = tape.leaf(x);
  Mat got = recurrent_aggregate({xt}, g.cell).value();

  const auto sig = [](const Mat& m) {
    return Mat(m.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); }));
  };
  const Mat i = sig(x * p.w_i + p.b_i);
  const Mat f = sig(x * p.w_f + p.b_f);
  const Mat gg = (x * p.w_g + p.b_g).array().tanh().matrix();
  const Mat o = sig(x * p.w_o + p.b_o);
  const Mat c = i.cwiseProduct(gg);
  const Mat expect = o.cwiseProduct(c.array().tanh().matrix());
  CHECK((got - expect).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("global_forward: degenerate configuration gives zero output") {
  // T=1, L=1, ratio 1, zero recurrent parameters
  Rng rng(48);
  auto s = testing::random_sample(4, 1, rng);
  Tape tape;
  GlobalEncoderTensors params;
  params.pool_ratio = 1.0;
  params.blocks.push_back(
      {tape.leaf(testing::random_mat(3, 2, rng)), tape.leaf(testing::random_mat(2, 1, rng))});
  params.cell.kind = RnnKind::kLstm;
  const auto z = [&](Eigen::Index r, Eigen::Index c) { return tape.leaf(Mat::Zero(r, c)); };
  params.cell.lstm = {z(4, 3), z(3, 3), z(1, 3), z(4, 3), z(3, 3), z(1, 3),
                      z(4, 3), z(3, 3), z(1, 3), z(4, 3), z(3, 3), z(1, 3)};

  auto out = global_forward(s, tape.leaf(testing::random_mat(4, 3, rng)), params);
  CHECK(out.z_global.value().cwiseAbs().maxCoeff() == 0.0);
  CHECK(out.traces.size() == 1);
}

TEST_CASE("global_forward handles all-isolated snapshots") {
  Rng rng(49);
  DynamicGraphSample s;
  s.num_nodes = 4;
  s.node_vocab_ids = {0, 1, 2, 3};
  s.snapshots = {make_adjacency(4, {}), make_adjacency(4, {})};

  DenseGlobalParams p = random_dense_params(3, 2, 3, 2, rng);
  Tape tape;
  auto out = global_forward(s, tape.leaf(testing::random_mat(4, 3, rng)),
                            bind_dense_params(tape, p));
  CHECK(out.z_global.value().allFinite());
}

TEST_CASE("global_forward matches the straight-line dense oracle") {
  Rng rng(50);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 6, T = 3, h2 = 4, g = 3;
    auto s = testing::random_sample(n, T, rng, 0.5);
    Mat h_l = testing::random_mat(n, h2, rng);
    DenseGlobalParams p = random_dense_params(h2, g, h2, 2, rng);
    p.ratio = 0.5;

    Tape tape;
    auto got = global_forward(s, tape.leaf(h_l), bind_dense_params(tape, p));
    Mat expect = global_forward_dense(s, h_l, p);
    CHECK((got.z_global.value() - expect).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("coarse graph at each block is the induced submatrix of its input") {
  Rng rng(51);
  const int n = 8;
  auto s = testing::random_sample(n, 2, rng, 0.5);
  DenseGlobalParams p = random_dense_params(4, 3, 4, 2, rng);

  Tape tape;
  auto out = global_forward(s, tape.leaf(testing::random_mat(n, 4, rng)),
                            bind_dense_params(tape, p));
  // traces are ordered (t0 b0), (t0 b1), (t1 b0), (t1 b1)
  REQUIRE(out.traces.size() == 4);
  for (int t = 0; t < 2; ++t) {
    const auto& first = out.traces[static_cast<std::size_t>(2 * t)];
    const auto& second = out.traces[static_cast<std::size_t>(2 * t + 1)];
    // block 1's input is block 0's coarse graph; selecting within it must
    // reproduce the induced submatrix
    std::vector<int> local_idx;
    for (int orig : second.original_idx) {
      auto it = std::find(first.original_idx.begin(), first.original_idx.end(), orig);
      REQUIRE(it != first.original_idx.end());
      local_idx.push_back(static_cast<int>(it - first.original_idx.begin()));
    }
    Mat expect = oracle::submatrix_dense(first.coarse.dense(), local_idx);
    CHECK((second.coarse.dense() - expect).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("global_forward is invariant under node permutation with distinct scores") {
  Rng rng(52);
  int done = 0;
  while (done < 25) {
    const int n = rng.uniform_int(4, 8);
    auto s = testing::random_sample(n, 2, rng, 0.5);
    Mat h_l = testing::random_mat(n, 4, rng);
    DenseGlobalParams p = random_dense_params(4, 3, 4, 2, rng);

    // keep only trials whose pooling scores are well separated at the first
    // block of every snapshot, so selection is stable under permutation
    bool distinct = true;
    for (const auto& snap : s.snapshots) {
      const Mat ahat = oracle::normalize_dense(snap.dense());
      const Mat ht = (ahat * h_l * p.block_w[0]).cwiseMax(0.0);
      const Mat sc = (ahat * ht * p.block_att[0]).array().tanh().matrix();
      for (int i = 0; i < n && distinct; ++i)
        for (int j = i + 1; j < n; ++j)
          if (std::abs(sc(i, 0) - sc(j, 0)) < 1e-6) {
            distinct = false;
            break;
          }
    }
    if (!distinct) continue;
    ++done;

    std::vector<int> perm(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
    rng.shuffle(perm);
    auto s_p = testing::permute_sample(s, perm);
    Mat h_l_p(n, 4);
    for (int i = 0; i < n; ++i) h_l_p.row(perm[static_cast<std::size_t>(i)]) = h_l.row(i);

    Tape t1, t2;
    auto base = global_forward(s, t1.leaf(h_l), bind_dense_params(t1, p));
    auto moved = global_forward(s_p, t2.leaf(h_l_p), bind_dense_params(t2, p));
    CHECK((base.z_global.value() - moved.z_global.value()).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("full global_forward path passes grad_check, reaching the attention weights") {
  Rng rng(53);
  const int n = 6, T = 2;
  auto s = testing::random_sample(n, T, rng, 0.5);
  const Mat h_l = testing::random_mat(n, 4, rng);
  DenseGlobalParams dense = random_dense_params(4, 3, 4, 2, rng);

  ParamStore ps;
  for (std::size_t l = 0; l < dense.block_w.size(); ++l) {
    ps.add("b" + std::to_string(l) + ".gcn_w", dense.block_w[l]);
    ps.add("b" + std::to_string(l) + ".att_w", dense.block_att[l]);
  }
  ps.add("rnn.w_i", dense.w_i);
  ps.add("rnn.u_i", dense.u_i);
  ps.add("rnn.b_i", dense.b_i);
  ps.add("rnn.w_f", dense.w_f);
  ps.add("rnn.u_f", dense.u_f);
  ps.add("rnn.b_f", dense.b_f);
  ps.add("rnn.w_g", dense.w_g);
  ps.add("rnn.u_g", dense.u_g);
  ps.add("rnn.b_g", dense.b_g);
  ps.add("rnn.w_o", dense.w_o);
  ps.add("rnn.u_o", dense.u_o);
  ps.add("rnn.b_o", dense.b_o);

  auto bind = [&](Tape& tape, ParamStore& p) {
    GlobalEncoderTensors out;
    out.pool_ratio = 0.5;
    for (std::size_t l = 0; l < dense.block_w.size(); ++l)
      out.blocks.push_back({p.use(tape, "b" + std::to_string(l) + ".gcn_w"),
                            p.use(tape, "b" + std::to_string(l) + ".att_w")});
    out.cell.kind = RnnKind::kLstm;
    out.cell.lstm = {p.use(tape, "rnn.w_i"), p.use(tape, "rnn.u_i"), p.use(tape, "rnn.b_i"),
                     p.use(tape, "rnn.w_f"), p.use(tape, "rnn.u_f"), p.use(tape, "rnn.b_f"),
                     p.use(tape, "rnn.w_g"), p.use(tape, "rnn.u_g"), p.use(tape, "rnn.b_g"),
                     p.use(tape, "rnn.w_o"), p.use(tape, "rnn.u_o"), p.use(tape, "rnn.b_o")};
    return out;
  };

  auto f = [&](Tape& tape, ParamStore& p) {
    auto out = global_forward(s, tape.leaf(h_l), bind(tape, p));
    return sum(tanh(out.z_global));
  };

  // attention weights must receive gradient through the score gating
  {
    Tape tape;
    ps.zero_grad();
    tape.backward(f(tape, ps));
    CHECK(ps.grad("b0.att_w").cwiseAbs().maxCoeff() > 0.0);
  }

  auto report = grad_check(f, ps, 1e-5);
  INFO("worst: ", report.worst_param, " err ", report.max_rel_err);
  CHECK(report.max_rel_err < 1e-4);
}
