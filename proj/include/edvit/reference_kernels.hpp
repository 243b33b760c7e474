#pragma once

#include "edvit/tensor.hpp"

// Plain serial implementations of the hot kernels. Kept as the comparison
// baseline for the parallel versions (tests assert exact agreement, the
// benchmark measures the gap). Never used on the library's own paths.
namespace edvit::ref {

Tensor matmul(const Tensor& a, const Tensor& b);
Tensor linear(const Tensor& x, const DenseLayer& layer);
Tensor softmax_rows(const Tensor& x);

}  // namespace edvit::ref
