#include "dygcl/objective.hpp"

namespace dygcl {

Tensor contrastive_loss(Tensor z_local, Tensor z_global) {
  return affine(cosine_similarity(z_local, z_global), -1.0, 1.0);
}

Tensor fuse(Tensor z_local, Tensor z_global, const HeadTensors& p) {
  Tensor left = add(matmul(z_local, p.w_l), p.b_l);
  Tensor right = add(matmul(z_global, p.w_g), p.b_g);
  return tanh(concat_cols(left, right));
}

Tensor predict(Tensor z_final, const HeadTensors& p) {
  Tensor hidden = tanh(add(matmul(z_final, p.mlp_w1), p.mlp_b1));
  Tensor logit = add(matmul(hidden, p.mlp_w2), p.mlp_b2);
  return clamp(sigmoid(logit), 1e-7, 1.0 - 1e-7);
}

Tensor supervised_loss(Tensor y_hat, int label) { return binary_cross_entropy(y_hat, label); }

Tensor total_loss(Tensor l_sup, Tensor l_contra, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw ConfigError("loss weight must be in [0, 1]");
  if (lambda == 1.0) return l_sup;
  if (lambda == 0.0) return l_contra;
  return add(affine(l_sup, lambda, 0.0), affine(l_contra, 1.0 - lambda, 0.0));
}

}  // namespace dygcl
