#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "dygcl/error.hpp"

namespace dygcl {

// Dense matrices are row-major throughout; serialization emits values in
// storage order.
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Undirected snapshot graph. Edges are stored once with u < v, deduplicated,
// self-loops excluded (normalization adds them).
struct SparseAdjacency {
  struct Edge {
    int u;
    int v;
    double w;
  };

  int num_nodes = 0;
  std::vector<Edge> edges;

  Mat dense() const;
};

// Build a validated adjacency from unordered pairs. Pairs are canonicalized
// to u < v and sorted; out-of-range indices, self-loops and duplicate
// unordered pairs are rejected.
SparseAdjacency make_adjacency(int num_nodes,
                               const std::vector<std::pair<int, int>>& pairs,
                               const std::vector<double>& weights = {});

// D^{-1/2} (A+I) D^{-1/2} in CSR form. Symmetric, strictly positive diagonal.
struct NormalizedAdjacency {
  int num_nodes = 0;
  std::vector<int> row_ptr;
  std::vector<int> col_idx;
  std::vector<double> vals;

  double entry(int i, int j) const;
  Mat dense() const;
};

NormalizedAdjacency normalize_adjacency(const SparseAdjacency& a);

// Submatrix on idx (strictly increasing, in range); node a of the output is
// input node idx[a].
SparseAdjacency induced_subgraph(const SparseAdjacency& a, const std::vector<int>& idx);
NormalizedAdjacency induced_subgraph(const NormalizedAdjacency& a, const std::vector<int>& idx);

// One labeled sequence of T snapshots over a fixed node set.
struct DynamicGraphSample {
  std::string sample_id;
  int num_nodes = 0;
  std::vector<SparseAdjacency> snapshots;
  std::vector<int> node_vocab_ids;
  int label = 0;
};

// Per-sample node feature matrix, N x d.
struct SemanticFeatures {
  Mat h_sem;
};

// Checks every type invariant plus feature-row agreement. Reports instead of
// throwing; empty result means valid.
std::vector<std::string> validate_sample(const DynamicGraphSample& s,
                                         const SemanticFeatures& features);

// Union of all snapshot edge sets; duplicate pairs keep their maximum weight.
SparseAdjacency union_snapshots(const DynamicGraphSample& s);

}  // namespace dygcl
