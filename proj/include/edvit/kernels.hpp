#pragma once

#include <utility>
#include <vector>

#include "edvit/tensor.hpp"

namespace edvit {

// Neural kernels used by the forward passes and by head/fusion training.
// All kernels accumulate in fp32 with a fixed left-to-right order per output
// element, so results are bit-identical regardless of thread count.

// [m,k] x [k,n] -> [m,n]
Tensor matmul(const Tensor& a, const Tensor& b);

// y[t,o] = sum_i x[t,i] * w[o,i] + b[o]; avoids materializing a transpose.
Tensor linear(const Tensor& x, const DenseLayer& layer);

// Row-wise softmax with per-row max subtraction.
Tensor softmax_rows(const Tensor& x);

// Normalizes each row of x (rank 2) or the whole vector (rank 1) to zero
// mean / unit variance, then applies the per-channel affine.
Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& shift, float eps = 1e-5f);

// Elementwise tanh-approximation GELU.
Tensor gelu(const Tensor& x);
float gelu_scalar(float x);
float gelu_grad_scalar(float x);

Tensor dense_forward(const DenseLayer& layer, const Tensor& x);

struct DenseGrads {
  Tensor weight;  // [out, in]
  Tensor bias;    // [out]
  Tensor input;   // [batch, in]
};

DenseGrads dense_backward(const DenseLayer& layer, const Tensor& x, const Tensor& upstream);

// Mean negative log-softmax of the true class; grad = (softmax - onehot) / batch.
std::pair<float, Tensor> cross_entropy_with_grad(const Tensor& logits,
                                                 const std::vector<int>& labels);

// Adam moment buffers for one parameter tensor.
struct AdamState {
  Tensor m;
  Tensor v;
  explicit AdamState(const std::vector<int64_t>& dims) : m(dims), v(dims) {}
};

struct AdamConfig {
  float lr = 1e-4f;
  float beta1 = 0.9f;
  float beta2 = 0.999f;
  float eps = 1e-8f;
};

// In-place Adam update; step counts from 1 for bias correction.
void adam_step(Tensor& param, const Tensor& grad, AdamState& state, const AdamConfig& cfg,
               int64_t step);

}  // namespace edvit
