#include "dygcl/ops.hpp"

#include <cmath>
#include <string>

namespace dygcl {

namespace {

std::string shape_of(const Tensor& t) {
  return std::to_string(t.rows()) + "x" + std::to_string(t.cols());
}

void require_same_tape(Tensor a, Tensor b) {
  if (a.tape != b.tape) throw Error("operands live on different tapes");
}

double stable_sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

Tensor matmul(Tensor a, Tensor b) {
  require_same_tape(a, b);
  if (a.cols() != b.rows())
    throw ShapeError("matmul: " + shape_of(a) + " * " + shape_of(b));
  Tape& t = *a.tape;
  Mat out = a.value() * b.value();
  const bool rg = a.requires_grad() || b.requires_grad();
  const int aid = a.id, bid = b.id;
  return t.record(std::move(out), rg, [aid, bid](Tape& tp, const Mat& g) {
    tp.accumulate(aid, g * tp.value(bid).transpose());
    tp.accumulate(bid, tp.value(aid).transpose() * g);
  });
}

Tensor spmm(const NormalizedAdjacency& a, Tensor h) {
  if (h.rows() != a.num_nodes)
    throw ShapeError("spmm: adjacency is " + std::to_string(a.num_nodes) + " nodes, features " +
                     shape_of(h));
  Tape& t = *h.tape;
  const Mat& hv = h.value();
  Mat out = Mat::Zero(a.num_nodes, hv.cols());
  for (int i = 0; i < a.num_nodes; ++i)
    for (int k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k)
      out.row(i) += a.vals[k] * hv.row(a.col_idx[k]);
  const int hid = h.id;
  return t.record(std::move(out), h.requires_grad(), [a, hid](Tape& tp, const Mat& g) {
    // A is symmetric, so dH = A^T g = A g.
    Mat dh = Mat::Zero(g.rows(), g.cols());
    for (int i = 0; i < a.num_nodes; ++i)
      for (int k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k)
        dh.row(i) += a.vals[k] * g.row(a.col_idx[k]);
    tp.accumulate(hid, dh);
  });
}

Tensor add(Tensor a, Tensor b) {
  require_same_tape(a, b);
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ShapeError("add: " + shape_of(a) + " + " + shape_of(b));
  Tape& t = *a.tape;
  const int aid = a.id, bid = b.id;
  return t.record(a.value() + b.value(), a.requires_grad() || b.requires_grad(),
                  [aid, bid](Tape& tp, const Mat& g) {
                    tp.accumulate(aid, g);
                    tp.accumulate(bid, g);
                  });
}

Tensor add_bias(Tensor x, Tensor bias) {
  require_same_tape(x, bias);
  if (bias.rows() != 1 || bias.cols() != x.cols())
    throw ShapeError("add_bias: " + shape_of(x) + " with bias " + shape_of(bias));
  Tape& t = *x.tape;
  Mat out = x.value();
  out.rowwise() += bias.value().row(0);
  const int xid = x.id, bid = bias.id;
  return t.record(std::move(out), x.requires_grad() || bias.requires_grad(),
                  [xid, bid](Tape& tp, const Mat& g) {
                    tp.accumulate(xid, g);
                    tp.accumulate(bid, g.colwise().sum());
                  });
}

Tensor hadamard(Tensor a, Tensor b) {
  require_same_tape(a, b);
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ShapeError("hadamard: " + shape_of(a) + " * " + shape_of(b));
  Tape& t = *a.tape;
  const int aid = a.id, bid = b.id;
  return t.record(a.value().cwiseProduct(b.value()), a.requires_grad() || b.requires_grad(),
                  [aid, bid](Tape& tp, const Mat& g) {
                    tp.accumulate(aid, g.cwiseProduct(tp.value(bid)));
                    tp.accumulate(bid, g.cwiseProduct(tp.value(aid)));
                  });
}

Tensor affine(Tensor x, double scale, double shift) {
  Tape& t = *x.tape;
  Mat out = (x.value().array() * scale + shift).matrix();
  const int xid = x.id;
  return t.record(std::move(out), x.requires_grad(), [xid, scale](Tape& tp, const Mat& g) {
    tp.accumulate(xid, (g.array() * scale).matrix());
  });
}

Tensor tanh(Tensor x) {
  Tape& t = *x.tape;
  Mat y = x.value().array().tanh().matrix();
  Mat dfactor = (1.0 - y.array().square()).matrix();
  const int xid = x.id;
  return t.record(std::move(y), x.requires_grad(),
                  [xid, dfactor = std::move(dfactor)](Tape& tp, const Mat& g) {
                    tp.accumulate(xid, g.cwiseProduct(dfactor));
                  });
}

Tensor sigmoid(Tensor x) {
  Tape& t = *x.tape;
  Mat y = x.value().unaryExpr([](double v) { return stable_sigmoid(v); });
  Mat dfactor = y.cwiseProduct((1.0 - y.array()).matrix());
  const int xid = x.id;
  return t.record(std::move(y), x.requires_grad(),
                  [xid, dfactor = std::move(dfactor)](Tape& tp, const Mat& g) {
                    tp.accumulate(xid, g.cwiseProduct(dfactor));
                  });
}

Tensor relu(Tensor x) {
  Tape& t = *x.tape;
  Mat mask = (x.value().array() > 0.0).cast<double>().matrix();
  Mat y = x.value().cwiseProduct(mask);
  const int xid = x.id;
  return t.record(std::move(y), x.requires_grad(),
                  [xid, mask = std::move(mask)](Tape& tp, const Mat& g) {
                    tp.accumulate(xid, g.cwiseProduct(mask));
                  });
}

Tensor concat_cols(Tensor x, Tensor y) {
  require_same_tape(x, y);
  if (x.rows() != y.rows())
    throw ShapeError("concat_cols: " + shape_of(x) + " | " + shape_of(y));
  Tape& t = *x.tape;
  Mat out(x.rows(), x.cols() + y.cols());
  out.leftCols(x.cols()) = x.value();
  out.rightCols(y.cols()) = y.value();
  const int xid = x.id, yid = y.id;
  const Eigen::Index xc = x.cols(), yc = y.cols();
  return t.record(std::move(out), x.requires_grad() || y.requires_grad(),
                  [xid, yid, xc, yc](Tape& tp, const Mat& g) {
                    tp.accumulate(xid, g.leftCols(xc));
                    tp.accumulate(yid, g.rightCols(yc));
                  });
}

Tensor row_mean(Tensor h) {
  if (h.rows() < 1) throw ShapeError("row_mean on an empty matrix");
  Tape& t = *h.tape;
  Mat out = h.value().colwise().mean();
  const int hid = h.id;
  const Eigen::Index n = h.rows();
  return t.record(std::move(out), h.requires_grad(), [hid, n](Tape& tp, const Mat& g) {
    tp.accumulate(hid, (g / static_cast<double>(n)).replicate(n, 1));
  });
}

Tensor col_max(Tensor h) {
  if (h.rows() < 1) throw ShapeError("col_max on an empty matrix");
  Tape& t = *h.tape;
  const Mat& hv = h.value();
  Mat out(1, hv.cols());
  std::vector<Eigen::Index> argmax(static_cast<std::size_t>(hv.cols()));
  for (Eigen::Index j = 0; j < hv.cols(); ++j) {
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < hv.rows(); ++i)
      if (hv(i, j) > hv(best, j)) best = i;  // first argmax wins ties
    argmax[static_cast<std::size_t>(j)] = best;
    out(0, j) = hv(best, j);
  }
  const int hid = h.id;
  const Eigen::Index rows = hv.rows();
  return t.record(std::move(out), h.requires_grad(),
                  [hid, rows, argmax = std::move(argmax)](Tape& tp, const Mat& g) {
                    Mat dh = Mat::Zero(rows, g.cols());
                    for (Eigen::Index j = 0; j < g.cols(); ++j)
                      dh(argmax[static_cast<std::size_t>(j)], j) = g(0, j);
                    tp.accumulate(hid, dh);
                  });
}

Tensor gather_rows(Tensor h, const std::vector<int>& idx) {
  Tape& t = *h.tape;
  const Mat& hv = h.value();
  for (int i : idx)
    if (i < 0 || i >= hv.rows())
      throw ValidationError("gather_rows index out of range: " + std::to_string(i));
  Mat out(static_cast<Eigen::Index>(idx.size()), hv.cols());
  for (std::size_t r = 0; r < idx.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = hv.row(idx[r]);
  const int hid = h.id;
  const Eigen::Index rows = hv.rows();
  return t.record(std::move(out), h.requires_grad(),
                  [hid, rows, idx](Tape& tp, const Mat& g) {
                    Mat dh = Mat::Zero(rows, g.cols());
                    for (std::size_t r = 0; r < idx.size(); ++r)
                      dh.row(idx[r]) += g.row(static_cast<Eigen::Index>(r));
                    tp.accumulate(hid, dh);
                  });
}

Tensor scale_rows(Tensor h, Tensor s) {
  require_same_tape(h, s);
  if (s.cols() != 1 || s.rows() != h.rows())
    throw ShapeError("scale_rows: " + shape_of(h) + " with scales " + shape_of(s));
  Tape& t = *h.tape;
  Mat out = h.value().array().colwise() * s.value().col(0).array();
  const int hid = h.id, sid = s.id;
  return t.record(std::move(out), h.requires_grad() || s.requires_grad(),
                  [hid, sid](Tape& tp, const Mat& g) {
                    const Mat& hv = tp.value(hid);
                    const Mat& sv = tp.value(sid);
                    tp.accumulate(hid, (g.array().colwise() * sv.col(0).array()).matrix());
                    tp.accumulate(sid, g.cwiseProduct(hv).rowwise().sum());
                  });
}

Tensor sum(Tensor x) {
  Tape& t = *x.tape;
  Mat out(1, 1);
  out(0, 0) = x.value().sum();
  const int xid = x.id;
  const Eigen::Index r = x.rows(), c = x.cols();
  return t.record(std::move(out), x.requires_grad(), [xid, r, c](Tape& tp, const Mat& g) {
    tp.accumulate(xid, Mat::Constant(r, c, g(0, 0)));
  });
}

Tensor cosine_similarity(Tensor a, Tensor b) {
  require_same_tape(a, b);
  if (a.rows() != 1 || b.rows() != 1 || a.cols() != b.cols())
    throw ShapeError("cosine_similarity: " + shape_of(a) + " vs " + shape_of(b));
  const double na = a.value().norm();
  const double nb = b.value().norm();
  if (na <= 1e-12 || nb <= 1e-12)
    throw NumericError("cosine_similarity: near-zero norm (degenerate embedding)");
  const double dot = (a.value() * b.value().transpose())(0, 0);
  const double s = dot / (na * nb);
  Tape& t = *a.tape;
  Mat out(1, 1);
  out(0, 0) = s;
  const int aid = a.id, bid = b.id;
  return t.record(std::move(out), a.requires_grad() || b.requires_grad(),
                  [aid, bid, na, nb, s](Tape& tp, const Mat& g) {
                    const Mat& av = tp.value(aid);
                    const Mat& bv = tp.value(bid);
                    const double gs = g(0, 0);
                    tp.accumulate(aid, gs * (bv / (na * nb) - (s / (na * na)) * av));
                    tp.accumulate(bid, gs * (av / (na * nb) - (s / (nb * nb)) * bv));
                  });
}

Tensor clamp(Tensor x, double lo, double hi) {
  Tape& t = *x.tape;
  const Mat& xv = x.value();
  Mat out = xv.cwiseMax(lo).cwiseMin(hi);
  Mat mask = ((xv.array() > lo) && (xv.array() < hi)).cast<double>().matrix();
  const int xid = x.id;
  return t.record(std::move(out), x.requires_grad(),
                  [xid, mask = std::move(mask)](Tape& tp, const Mat& g) {
                    tp.accumulate(xid, g.cwiseProduct(mask));
                  });
}

Tensor dropout(Tensor x, double rate, Rng& rng, bool training) {
  if (!training || rate <= 0.0) return x;
  if (rate >= 1.0) throw ConfigError("dropout rate must be below 1");
  Tape& t = *x.tape;
  const double keep = 1.0 - rate;
  Mat mask(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < mask.rows(); ++i)
    for (Eigen::Index j = 0; j < mask.cols(); ++j)
      mask(i, j) = rng.uniform() < keep ? 1.0 / keep : 0.0;
  Mat out = x.value().cwiseProduct(mask);
  const int xid = x.id;
  return t.record(std::move(out), x.requires_grad(),
                  [xid, mask = std::move(mask)](Tape& tp, const Mat& g) {
                    tp.accumulate(xid, g.cwiseProduct(mask));
                  });
}

Tensor binary_cross_entropy(Tensor p, int label) {
  if (p.rows() != 1 || p.cols() != 1)
    throw ShapeError("binary_cross_entropy expects a scalar probability");
  if (label != 0 && label != 1) throw ValidationError("label not binary");
  const double pv = p.value()(0, 0);
  if (pv <= 0.0 || pv >= 1.0)
    throw NumericError("binary_cross_entropy: probability outside (0,1)");
  const double y = static_cast<double>(label);
  Tape& t = *p.tape;
  Mat out(1, 1);
  out(0, 0) = -(y * std::log(pv) + (1.0 - y) * std::log(1.0 - pv));
  const int pid = p.id;
  return t.record(std::move(out), p.requires_grad(), [pid, pv, y](Tape& tp, const Mat& g) {
    Mat d(1, 1);
    d(0, 0) = g(0, 0) * (-(y / pv) + (1.0 - y) / (1.0 - pv));
    tp.accumulate(pid, d);
  });
}

Activation activation_from_string(const std::string& s) {
  if (s == "relu") return Activation::kRelu;
  if (s == "tanh") return Activation::kTanh;
  if (s == "sigmoid") return Activation::kSigmoid;
  throw ConfigError("unknown activation: " + s);
}

Tensor apply_activation(Tensor x, Activation act) {
  switch (act) {
    case Activation::kRelu: return relu(x);
    case Activation::kTanh: return tanh(x);
    case Activation::kSigmoid: return sigmoid(x);
  }
  throw Error("unreachable");
}

}  // namespace dygcl
