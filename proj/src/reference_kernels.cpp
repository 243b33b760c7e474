#include "edvit/reference_kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace edvit::ref {

Tensor matmul(const Tensor& a, const Tensor& b) {
  a.require_rank(2);
  b.require_rank(2);
  if (a.cols() != b.rows()) throw std::invalid_argument("ref::matmul: inner dims differ");
  const int64_t m = a.rows(), k = a.cols(), n = b.cols();
  Tensor out({m, n});
  for (int64_t i = 0; i < m; ++i) {
    for (int64_t j = 0; j < n; ++j) {
      float acc = 0.0f;
      for (int64_t t = 0; t < k; ++t) acc += a.at(i, t) * b.at(t, j);
      out.at(i, j) = acc;
    }
  }
  return out;
}

Tensor linear(const Tensor& x, const DenseLayer& layer) {
  x.require_rank(2);
  if (x.cols() != layer.in_dim()) throw std::invalid_argument("ref::linear: dim mismatch");
  const int64_t t = x.rows(), in = x.cols(), out = layer.out_dim();
  Tensor y({t, out});
  for (int64_t r = 0; r < t; ++r) {
    for (int64_t o = 0; o < out; ++o) {
      float acc = layer.bias[o];
      for (int64_t i = 0; i < in; ++i) acc += x.at(r, i) * layer.weight.at(o, i);
      y.at(r, o) = acc;
    }
  }
  return y;
}

Tensor softmax_rows(const Tensor& x) {
  x.require_rank(2);
  const int64_t m = x.rows(), n = x.cols();
  Tensor out({m, n});
  for (int64_t i = 0; i < m; ++i) {
    float mx = x.at(i, 0);
    for (int64_t j = 1; j < n; ++j) mx = std::max(mx, x.at(i, j));
    float sum = 0.0f;
    for (int64_t j = 0; j < n; ++j) {
      out.at(i, j) = std::exp(x.at(i, j) - mx);
      sum += out.at(i, j);
    }
    for (int64_t j = 0; j < n; ++j) out.at(i, j) /= sum;
  }
  return out;
}

}  // namespace edvit::ref
