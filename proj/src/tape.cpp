#include "dygcl/tape.hpp"

namespace dygcl {

const Mat& Tensor::value() const {
  if (!tape || id < 0) throw Error("tensor handle is empty");
  return tape->value(id);
}

bool Tensor::requires_grad() const { return tape && id >= 0 && tape->node_requires_grad(id); }

double Tensor::scalar() const {
  const Mat& v = value();
  if (v.rows() != 1 || v.cols() != 1)
    throw ShapeError("scalar() on a " + std::to_string(v.rows()) + "x" +
                     std::to_string(v.cols()) + " tensor");
  return v(0, 0);
}

Tensor Tape::leaf(Mat value, bool requires_grad) {
  if (!value.allFinite()) throw NumericError("leaf tensor has non-finite entries");
  nodes_.push_back({std::move(value), Mat(), requires_grad, nullptr});
  return Tensor{this, static_cast<int>(nodes_.size()) - 1};
}

Tensor Tape::record(Mat value, bool requires_grad, Backprop backprop) {
  if (!value.allFinite()) throw NumericError("op produced non-finite values");
  nodes_.push_back({std::move(value), Mat(), requires_grad,
                    requires_grad ? std::move(backprop) : nullptr});
  return Tensor{this, static_cast<int>(nodes_.size()) - 1};
}

void Tape::accumulate(int id, const Mat& g) {
  Node& n = nodes_[static_cast<std::size_t>(id)];
  if (!n.requires_grad) return;
  if (n.adjoint.size() == 0)
    n.adjoint = g;
  else
    n.adjoint += g;
}

Mat Tape::grad(int id) const {
  const Node& n = nodes_[static_cast<std::size_t>(id)];
  if (n.adjoint.size() == 0) return Mat::Zero(n.value.rows(), n.value.cols());
  return n.adjoint;
}

void Tape::backward(Tensor loss) {
  if (loss.tape != this) throw Error("loss tensor belongs to a different tape");
  const Mat& v = value(loss.id);
  if (v.rows() != 1 || v.cols() != 1)
    throw ShapeError("backward requires a scalar loss, got " + std::to_string(v.rows()) + "x" +
                     std::to_string(v.cols()));

  for (auto& n : nodes_) n.adjoint = Mat();
  nodes_[static_cast<std::size_t>(loss.id)].adjoint = Mat::Ones(1, 1);

  for (int i = loss.id; i >= 0; --i) {
    Node& n = nodes_[static_cast<std::size_t>(i)];
    if (!n.requires_grad || n.adjoint.size() == 0 || !n.backprop) continue;
    n.backprop(*this, n.adjoint);
  }

  for (const auto& b : bindings_) {
    const Node& n = nodes_[static_cast<std::size_t>(b.id)];
    if (n.adjoint.size() == 0) continue;
    b.store->grad(b.name) += n.adjoint;
  }
}

void Tape::bind_param(int id, ParamStore* store, std::string name) {
  bindings_.push_back({id, store, std::move(name)});
}

void ParamStore::add(const std::string& name, Mat init) {
  if (values_.count(name)) throw Error("duplicate parameter name: " + name);
  grads_[name] = Mat::Zero(init.rows(), init.cols());
  values_[name] = std::move(init);
}

Mat& ParamStore::value(const std::string& name) {
  auto it = values_.find(name);
  if (it == values_.end()) throw Error("unknown parameter: " + name);
  return it->second;
}

const Mat& ParamStore::value(const std::string& name) const {
  auto it = values_.find(name);
  if (it == values_.end()) throw Error("unknown parameter: " + name);
  return it->second;
}

Mat& ParamStore::grad(const std::string& name) {
  auto it = grads_.find(name);
  if (it == grads_.end()) throw Error("unknown parameter: " + name);
  return it->second;
}

const Mat& ParamStore::grad(const std::string& name) const {
  auto it = grads_.find(name);
  if (it == grads_.end()) throw Error("unknown parameter: " + name);
  return it->second;
}

void ParamStore::zero_grad() {
  for (auto& [name, g] : grads_) g.setZero();
}

std::vector<std::string> ParamStore::names() const {
  std::vector<std::string> out;
  out.reserve(values_.size());
  for (const auto& [name, v] : values_) out.push_back(name);
  return out;
}

std::size_t ParamStore::parameter_count() const {
  std::size_t n = 0;
  for (const auto& [name, v] : values_) n += static_cast<std::size_t>(v.size());
  return n;
}

Tensor ParamStore::use(Tape& tape, const std::string& name) {
  Tensor t = tape.leaf(value(name), true);
  tape.bind_param(t.id, this, name);
  return t;
}

void ParamStore::restore(const std::map<std::string, Mat>& snap) {
  for (const auto& [name, v] : snap) value(name) = v;
}

}  // namespace dygcl
