#include "dygcl/graph.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace dygcl {

Mat SparseAdjacency::dense() const {
  Mat m = Mat::Zero(num_nodes, num_nodes);
  for (const auto& e : edges) {
    m(e.u, e.v) = e.w;
    m(e.v, e.u) = e.w;
  }
  return m;
}

SparseAdjacency make_adjacency(int num_nodes, const std::vector<std::pair<int, int>>& pairs,
                               const std::vector<double>& weights) {
  if (num_nodes < 0) throw ValidationError("negative node count");
  if (!weights.empty() && weights.size() != pairs.size())
    throw ValidationError("weight list length does not match edge list");

  SparseAdjacency a;
  a.num_nodes = num_nodes;
  a.edges.reserve(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    auto [u, v] = pairs[i];
    if (u < 0 || v < 0 || u >= num_nodes || v >= num_nodes)
      throw ValidationError("edge index out of range: (" + std::to_string(u) + ", " +
                            std::to_string(v) + ") with " + std::to_string(num_nodes) + " nodes");
    if (u == v) throw ValidationError("self-edge stored at node " + std::to_string(u));
    if (u > v) std::swap(u, v);
    a.edges.push_back({u, v, weights.empty() ? 1.0 : weights[i]});
  }
  std::sort(a.edges.begin(), a.edges.end(), [](const auto& x, const auto& y) {
    return x.u != y.u ? x.u < y.u : x.v < y.v;
  });
  for (std::size_t i = 1; i < a.edges.size(); ++i)
    if (a.edges[i].u == a.edges[i - 1].u && a.edges[i].v == a.edges[i - 1].v)
      throw ValidationError("duplicate unordered pair (" + std::to_string(a.edges[i].u) + ", " +
                            std::to_string(a.edges[i].v) + ")");
  return a;
}

double NormalizedAdjacency::entry(int i, int j) const {
  for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
    if (col_idx[k] == j) return vals[k];
  return 0.0;
}

Mat NormalizedAdjacency::dense() const {
  Mat m = Mat::Zero(num_nodes, num_nodes);
  for (int i = 0; i < num_nodes; ++i)
    for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) m(i, col_idx[k]) = vals[k];
  return m;
}

NormalizedAdjacency normalize_adjacency(const SparseAdjacency& a) {
  const int n = a.num_nodes;
  std::vector<double> deg(n, 1.0);  // self-loop
  for (const auto& e : a.edges) {
    if (e.u < 0 || e.v < 0 || e.u >= n || e.v >= n)
      throw ValidationError("edge index out of range in adjacency");
    deg[e.u] += e.w;
    deg[e.v] += e.w;
  }

  // Each entry computed once and mirrored so symmetry is exact.
  std::vector<std::vector<std::pair<int, double>>> rows(n);
  for (int i = 0; i < n; ++i) rows[i].emplace_back(i, 1.0 / deg[i]);
  for (const auto& e : a.edges) {
    const double val = e.w / std::sqrt(deg[e.u] * deg[e.v]);
    rows[e.u].emplace_back(e.v, val);
    rows[e.v].emplace_back(e.u, val);
  }

  NormalizedAdjacency out;
  out.num_nodes = n;
  out.row_ptr.assign(n + 1, 0);
  for (int i = 0; i < n; ++i) {
    std::sort(rows[i].begin(), rows[i].end());
    out.row_ptr[i + 1] = out.row_ptr[i] + static_cast<int>(rows[i].size());
    for (auto& [j, v] : rows[i]) {
      out.col_idx.push_back(j);
      out.vals.push_back(v);
    }
  }
  return out;
}

namespace {

void check_index_list(const std::vector<int>& idx, int n) {
  if (idx.empty()) throw ValidationError("empty index list");
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] < 0 || idx[i] >= n)
      throw ValidationError("subgraph index out of range: " + std::to_string(idx[i]));
    if (i > 0 && idx[i] <= idx[i - 1])
      throw ValidationError("subgraph index list must be strictly increasing");
  }
}

}  // namespace

SparseAdjacency induced_subgraph(const SparseAdjacency& a, const std::vector<int>& idx) {
  check_index_list(idx, a.num_nodes);
  std::vector<int> pos(a.num_nodes, -1);
  for (std::size_t i = 0; i < idx.size(); ++i) pos[idx[i]] = static_cast<int>(i);

  SparseAdjacency out;
  out.num_nodes = static_cast<int>(idx.size());
  for (const auto& e : a.edges)
    if (pos[e.u] >= 0 && pos[e.v] >= 0) out.edges.push_back({pos[e.u], pos[e.v], e.w});
  std::sort(out.edges.begin(), out.edges.end(), [](const auto& x, const auto& y) {
    return x.u != y.u ? x.u < y.u : x.v < y.v;
  });
  return out;
}

NormalizedAdjacency induced_subgraph(const NormalizedAdjacency& a, const std::vector<int>& idx) {
  check_index_list(idx, a.num_nodes);
  std::vector<int> pos(a.num_nodes, -1);
  for (std::size_t i = 0; i < idx.size(); ++i) pos[idx[i]] = static_cast<int>(i);

  NormalizedAdjacency out;
  out.num_nodes = static_cast<int>(idx.size());
  out.row_ptr.assign(idx.size() + 1, 0);
  for (std::size_t i = 0; i < idx.size(); ++i) {
    const int src = idx[i];
    for (int k = a.row_ptr[src]; k < a.row_ptr[src + 1]; ++k) {
      if (pos[a.col_idx[k]] >= 0) {
        out.col_idx.push_back(pos[a.col_idx[k]]);
        out.vals.push_back(a.vals[k]);
      }
    }
    out.row_ptr[i + 1] = static_cast<int>(out.col_idx.size());
  }
  return out;
}

SparseAdjacency union_snapshots(const DynamicGraphSample& s) {
  std::map<std::pair<int, int>, double> merged;
  for (const auto& snap : s.snapshots)
    for (const auto& e : snap.edges) {
      auto key = std::minmax(e.u, e.v);
      auto [it, inserted] = merged.emplace(std::make_pair(key.first, key.second), e.w);
      if (!inserted) it->second = std::max(it->second, e.w);
    }
  SparseAdjacency out;
  out.num_nodes = s.num_nodes;
  for (const auto& [key, w] : merged) out.edges.push_back({key.first, key.second, w});
  return out;
}

std::vector<std::string> validate_sample(const DynamicGraphSample& s,
                                         const SemanticFeatures& features) {
  std::vector<std::string> violations;
  const int n = s.num_nodes;

  if (n <= 0) violations.push_back("num_nodes must be positive");
  if (s.snapshots.empty()) violations.push_back("sample has no snapshots (T >= 1 required)");
  if (s.label != 0 && s.label != 1) violations.push_back("label not binary");
  if (static_cast<int>(s.node_vocab_ids.size()) != n)
    violations.push_back("node_vocab_ids length does not equal num_nodes");

  for (std::size_t t = 0; t < s.snapshots.size(); ++t) {
    const auto& snap = s.snapshots[t];
    const std::string where = "snapshot " + std::to_string(t);
    if (snap.num_nodes != n) {
      violations.push_back(where + ": snapshot node-count mismatch");
      continue;
    }
    std::set<std::pair<int, int>> seen;
    for (const auto& e : snap.edges) {
      if (e.u < 0 || e.v < 0 || e.u >= n || e.v >= n) {
        violations.push_back(where + ": edge index out of range");
        continue;
      }
      if (e.u == e.v) violations.push_back(where + ": self-edge stored");
      auto key = std::minmax(e.u, e.v);
      if (!seen.insert({key.first, key.second}).second)
        violations.push_back(where + ": duplicate unordered pair");
    }
  }

  if (features.h_sem.rows() != n)
    violations.push_back("feature row count does not equal num_nodes");
  if (!features.h_sem.allFinite()) violations.push_back("features contain non-finite entries");

  return violations;
}

}  // namespace dygcl
