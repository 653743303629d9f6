#pragma once

#include "dygcl/ops.hpp"

namespace dygcl {

struct HeadTensors {
  Tensor w_l, b_l;    // 2h -> 2h
  Tensor w_g, b_g;    // 2h -> 2h
  Tensor mlp_w1, mlp_b1;  // 4h -> mlp hidden
  Tensor mlp_w2, mlp_b2;  // mlp hidden -> 1
};

// 1 - cos(z_local, z_global), in [0, 2]; minimizing it maximizes the
// similarity between the two views.
Tensor contrastive_loss(Tensor z_local, Tensor z_global);

// tanh([z_local W_l + b_l || z_global W_g + b_g])
Tensor fuse(Tensor z_local, Tensor z_global, const HeadTensors& p);

// sigmoid(MLP(z_final)), clamped to [1e-7, 1 - 1e-7] for loss stability.
Tensor predict(Tensor z_final, const HeadTensors& p);

// Binary cross-entropy of a scalar probability against a {0,1} label.
Tensor supervised_loss(Tensor y_hat, int label);

// lambda * L_sup + (1 - lambda) * L_contra. The endpoints return the
// surviving term itself, so lambda = 1 is exactly the supervised-only loss.
Tensor total_loss(Tensor l_sup, Tensor l_contra, double lambda);

}  // namespace dygcl
