#pragma once

#include <vector>

#include "dygcl/graph.hpp"
#include "dygcl/rng.hpp"
#include "dygcl/tape.hpp"

namespace dygcl {

// Differentiable primitives. Forward values are checked finite; every op
// records its backward rule on the tape when any input requires gradient.

Tensor matmul(Tensor a, Tensor b);

// Sparse normalized adjacency times dense features; the adjacency is a
// constant (selection happens outside the tape).
Tensor spmm(const NormalizedAdjacency& a, Tensor h);

Tensor add(Tensor a, Tensor b);
// x: m x n, bias: 1 x n broadcast over rows.
Tensor add_bias(Tensor x, Tensor bias);
Tensor hadamard(Tensor a, Tensor b);
// scale * x + shift, elementwise.
Tensor affine(Tensor x, double scale, double shift);

Tensor tanh(Tensor x);
Tensor sigmoid(Tensor x);
Tensor relu(Tensor x);

Tensor concat_cols(Tensor x, Tensor y);
Tensor row_mean(Tensor h);
// Per-column max over rows; gradient routes to the first argmax row on ties.
Tensor col_max(Tensor h);
Tensor gather_rows(Tensor h, const std::vector<int>& idx);
// Multiplies row i of h by s(i, 0); differentiable w.r.t. both inputs.
Tensor scale_rows(Tensor h, Tensor s);
Tensor sum(Tensor x);

// a . b / (|a||b|), both 1 x h with norms above 1e-12.
Tensor cosine_similarity(Tensor a, Tensor b);

// Gradient passes only strictly inside (lo, hi).
Tensor clamp(Tensor x, double lo, double hi);

// Inverted dropout; identity when not training or rate is zero.
Tensor dropout(Tensor x, double rate, Rng& rng, bool training);

// -(y log p + (1-y) log(1-p)) for scalar p in (0,1), y in {0,1}.
Tensor binary_cross_entropy(Tensor p, int label);

enum class Activation { kRelu, kTanh, kSigmoid };
Activation activation_from_string(const std::string& s);
Tensor apply_activation(Tensor x, Activation act);

}  // namespace dygcl
