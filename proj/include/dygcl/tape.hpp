#pragma once

#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "dygcl/error.hpp"
#include "dygcl/graph.hpp"

namespace dygcl {

class Tape;
class ParamStore;

// Handle into the active tape. Cheap to copy; the tape owns the storage.
struct Tensor {
  Tape* tape = nullptr;
  int id = -1;

  const Mat& value() const;
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
  bool requires_grad() const;
  // Value of a 1x1 tensor.
  double scalar() const;
};

// Append-only record of primitive ops. Node order is topological by
// construction; backward sweeps it in reverse exactly once.
class Tape {
 public:
  using Backprop = std::function<void(Tape&, const Mat& upstream)>;

  Tensor leaf(Mat value, bool requires_grad = false);
  Tensor record(Mat value, bool requires_grad, Backprop backprop);

  // Propagates d(loss)/d(node) from a scalar loss, then accumulates into
  // every bound parameter store. Each call recomputes tape-local adjoints
  // from scratch, so repeated calls accumulate in the stores.
  void backward(Tensor loss);

  const Mat& value(int id) const { return nodes_[static_cast<std::size_t>(id)].value; }
  bool node_requires_grad(int id) const {
    return nodes_[static_cast<std::size_t>(id)].requires_grad;
  }

  // Adjoint of `id` after backward(); zero matrix if the node was never
  // reached.
  Mat grad(int id) const;

  // Adds `g` into the adjoint of node `id`; used by backprop closures.
  void accumulate(int id, const Mat& g);

  std::size_t size() const { return nodes_.size(); }

  void bind_param(int id, ParamStore* store, std::string name);

 private:
  struct Node {
    Mat value;
    Mat adjoint;  // empty until touched by the current backward pass
    bool requires_grad = false;
    Backprop backprop;  // empty for leaves and no-grad nodes
  };

  struct Binding {
    int id;
    ParamStore* store;
    std::string name;
  };

  std::vector<Node> nodes_;
  std::vector<Binding> bindings_;
};

// Named trainable tensors with gradient slots. Iteration order is
// lexicographic by name (std::map), which keeps every reduction over
// parameters deterministic.
class ParamStore {
 public:
  void add(const std::string& name, Mat init);
  bool has(const std::string& name) const { return values_.count(name) > 0; }

  Mat& value(const std::string& name);
  const Mat& value(const std::string& name) const;
  Mat& grad(const std::string& name);
  const Mat& grad(const std::string& name) const;

  void zero_grad();
  std::vector<std::string> names() const;
  std::size_t parameter_count() const;

  // Places the parameter on the tape as a differentiable leaf and binds it
  // so backward() accumulates into grad(name).
  Tensor use(Tape& tape, const std::string& name);

  std::map<std::string, Mat> snapshot() const { return values_; }
  void restore(const std::map<std::string, Mat>& snap);

 private:
  std::map<std::string, Mat> values_;
  std::map<std::string, Mat> grads_;
};

}  // namespace dygcl
