#include "edvit/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace edvit {

Tensor matmul(const Tensor& a, const Tensor& b) {
  a.require_rank(2);
  b.require_rank(2);
  if (a.cols() != b.rows()) {
    throw std::invalid_argument("matmul: inner dims differ (" + std::to_string(a.cols()) +
                                " vs " + std::to_string(b.rows()) + ")");
  }
  const int64_t m = a.rows(), k = a.cols(), n = b.cols();
  Tensor out({m, n});
#pragma omp parallel for schedule(static)
  for (int64_t i = 0; i < m; ++i) {
    const float* arow = &a.data[static_cast<size_t>(i * k)];
    float* orow = &out.data[static_cast<size_t>(i * n)];
    for (int64_t j = 0; j < n; ++j) {
      float acc = 0.0f;
      for (int64_t t = 0; t < k; ++t) acc += arow[t] * b.data[static_cast<size_t>(t * n + j)];
      orow[j] = acc;
    }
  }
  return out;
}

Tensor linear(const Tensor& x, const DenseLayer& layer) {
  x.require_rank(2);
  layer.validate();
  if (x.cols() != layer.in_dim()) {
    throw std::invalid_argument("linear: input dim " + std::to_string(x.cols()) +
                                " != layer in dim " + std::to_string(layer.in_dim()));
  }
  const int64_t t = x.rows(), in = x.cols(), out = layer.out_dim();
  Tensor y({t, out});
#pragma omp parallel for schedule(static)
  for (int64_t r = 0; r < t; ++r) {
    const float* xr = &x.data[static_cast<size_t>(r * in)];
    float* yr = &y.data[static_cast<size_t>(r * out)];
    for (int64_t o = 0; o < out; ++o) {
      const float* wr = &layer.weight.data[static_cast<size_t>(o * in)];
      float acc = layer.bias[o];
      for (int64_t i = 0; i < in; ++i) acc += xr[i] * wr[i];
      yr[o] = acc;
    }
  }
  return y;
}

Tensor softmax_rows(const Tensor& x) {
  x.require_rank(2);
  const int64_t m = x.rows(), n = x.cols();
  Tensor out({m, n});
#pragma omp parallel for schedule(static)
  for (int64_t i = 0; i < m; ++i) {
    const float* xr = &x.data[static_cast<size_t>(i * n)];
    float* orow = &out.data[static_cast<size_t>(i * n)];
    float mx = xr[0];
    for (int64_t j = 1; j < n; ++j) mx = std::max(mx, xr[j]);
    float sum = 0.0f;
    for (int64_t j = 0; j < n; ++j) {
      orow[j] = std::exp(xr[j] - mx);
      sum += orow[j];
    }
    for (int64_t j = 0; j < n; ++j) orow[j] /= sum;
  }
  return out;
}

static void layer_norm_row(const float* x, float* y, const Tensor& gain, const Tensor& shift,
                           int64_t d, float eps) {
  float mean = 0.0f;
  for (int64_t i = 0; i < d; ++i) mean += x[i];
  mean /= static_cast<float>(d);
  float var = 0.0f;
  for (int64_t i = 0; i < d; ++i) {
    float c = x[i] - mean;
    var += c * c;
  }
  var /= static_cast<float>(d);
  float inv = 1.0f / std::sqrt(var + eps);
  for (int64_t i = 0; i < d; ++i) y[i] = gain[i] * ((x[i] - mean) * inv) + shift[i];
}

Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& shift, float eps) {
  gain.require_rank(1);
  shift.require_rank(1);
  const int64_t d = gain.dim(0);
  if (shift.dim(0) != d) throw std::invalid_argument("layer_norm: gain/shift dims differ");
  if (x.rank() == 1) {
    if (x.dim(0) != d) throw std::invalid_argument("layer_norm: last dim != gain dim");
    Tensor out({d});
    layer_norm_row(x.data.data(), out.data.data(), gain, shift, d, eps);
    return out;
  }
  x.require_rank(2);
  if (x.cols() != d) throw std::invalid_argument("layer_norm: last dim != gain dim");
  const int64_t m = x.rows();
  Tensor out({m, d});
#pragma omp parallel for schedule(static)
  for (int64_t i = 0; i < m; ++i) {
    layer_norm_row(&x.data[static_cast<size_t>(i * d)], &out.data[static_cast<size_t>(i * d)],
                   gain, shift, d, eps);
  }
  return out;
}

namespace {
constexpr float kGeluCoeff = 0.7978845608028654f;  // sqrt(2/pi)
constexpr float kGeluCubic = 0.044715f;
}  // namespace

float gelu_scalar(float x) {
  float u = kGeluCoeff * (x + kGeluCubic * x * x * x);
  return 0.5f * x * (1.0f + std::tanh(u));
}

float gelu_grad_scalar(float x) {
  float u = kGeluCoeff * (x + kGeluCubic * x * x * x);
  float t = std::tanh(u);
  float sech2 = 1.0f - t * t;
  float du = kGeluCoeff * (1.0f + 3.0f * kGeluCubic * x * x);
  return 0.5f * (1.0f + t) + 0.5f * x * sech2 * du;
}

Tensor gelu(const Tensor& x) {
  Tensor out = x;
  const int64_t n = out.numel();
#pragma omp parallel for schedule(static)
  for (int64_t i = 0; i < n; ++i) out[i] = gelu_scalar(x[i]);
  return out;
}

Tensor dense_forward(const DenseLayer& layer, const Tensor& x) { return linear(x, layer); }

DenseGrads dense_backward(const DenseLayer& layer, const Tensor& x, const Tensor& upstream) {
  x.require_rank(2);
  upstream.require_rank(2);
  layer.validate();
  const int64_t batch = x.rows(), in = x.cols(), out = layer.out_dim();
  if (upstream.rows() != batch || upstream.cols() != out) {
    throw std::invalid_argument("dense_backward: upstream shape mismatch");
  }
  if (x.cols() != layer.in_dim()) {
    throw std::invalid_argument("dense_backward: input dim mismatch");
  }
  DenseGrads g{Tensor({out, in}), Tensor({out}), Tensor({batch, in})};
#pragma omp parallel for schedule(static)
  for (int64_t o = 0; o < out; ++o) {
    float db = 0.0f;
    float* gw = &g.weight.data[static_cast<size_t>(o * in)];
    for (int64_t t = 0; t < batch; ++t) {
      const float u = upstream.at(t, o);
      db += u;
      const float* xr = &x.data[static_cast<size_t>(t * in)];
      for (int64_t i = 0; i < in; ++i) gw[i] += u * xr[i];
    }
    g.bias[o] = db;
  }
#pragma omp parallel for schedule(static)
  for (int64_t t = 0; t < batch; ++t) {
    float* gx = &g.input.data[static_cast<size_t>(t * in)];
    for (int64_t o = 0; o < out; ++o) {
      const float u = upstream.at(t, o);
      const float* wr = &layer.weight.data[static_cast<size_t>(o * in)];
      for (int64_t i = 0; i < in; ++i) gx[i] += u * wr[i];
    }
  }
  return g;
}

std::pair<float, Tensor> cross_entropy_with_grad(const Tensor& logits,
                                                 const std::vector<int>& labels) {
  logits.require_rank(2);
  const int64_t batch = logits.rows(), k = logits.cols();
  if (static_cast<int64_t>(labels.size()) != batch) {
    throw std::invalid_argument("cross_entropy: label count != batch");
  }
  for (int lb : labels) {
    if (lb < 0 || lb >= k) throw std::invalid_argument("cross_entropy: label out of range");
  }
  Tensor probs = softmax_rows(logits);
  float loss = 0.0f;
  for (int64_t t = 0; t < batch; ++t) {
    loss += -std::log(std::max(probs.at(t, labels[static_cast<size_t>(t)]), 1e-30f));
  }
  loss /= static_cast<float>(batch);
  Tensor grad = probs;
  const float inv = 1.0f / static_cast<float>(batch);
  for (int64_t t = 0; t < batch; ++t) {
    grad.at(t, labels[static_cast<size_t>(t)]) -= 1.0f;
    for (int64_t j = 0; j < k; ++j) grad.at(t, j) *= inv;
  }
  return {loss, std::move(grad)};
}

void adam_step(Tensor& param, const Tensor& grad, AdamState& state, const AdamConfig& cfg,
               int64_t step) {
  require_same_shape(param, grad, "adam_step");
  const int64_t n = param.numel();
  const float bc1 = 1.0f - std::pow(cfg.beta1, static_cast<float>(step));
  const float bc2 = 1.0f - std::pow(cfg.beta2, static_cast<float>(step));
#pragma omp parallel for schedule(static)
  for (int64_t i = 0; i < n; ++i) {
    state.m[i] = cfg.beta1 * state.m[i] + (1.0f - cfg.beta1) * grad[i];
    state.v[i] = cfg.beta2 * state.v[i] + (1.0f - cfg.beta2) * grad[i] * grad[i];
    float mhat = state.m[i] / bc1;
    float vhat = state.v[i] / bc2;
    param[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
  }
}

}  // namespace edvit
