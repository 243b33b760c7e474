#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace edvit {

// Dense row-major fp32 tensor. Shape is a list of positive dims; data length
// always equals the product of dims.
struct Tensor {
  std::vector<int64_t> shape;
  std::vector<float> data;

  Tensor() = default;
  explicit Tensor(std::vector<int64_t> dims) : shape(std::move(dims)) {
    data.assign(static_cast<size_t>(numel_of(shape)), 0.0f);
  }

  static int64_t numel_of(const std::vector<int64_t>& dims) {
    int64_t n = 1;
    for (int64_t d : dims) {
      if (d <= 0) throw std::invalid_argument("tensor dims must be positive");
      n *= d;
    }
    return n;
  }

  static Tensor zeros(std::vector<int64_t> dims) { return Tensor(std::move(dims)); }

  int64_t numel() const { return static_cast<int64_t>(data.size()); }
  int rank() const { return static_cast<int>(shape.size()); }
  int64_t dim(int i) const { return shape.at(static_cast<size_t>(i)); }

  int64_t rows() const { require_rank(2); return shape[0]; }
  int64_t cols() const { require_rank(2); return shape[1]; }

  float& at(int64_t r, int64_t c) { return data[static_cast<size_t>(r * shape[1] + c)]; }
  float at(int64_t r, int64_t c) const { return data[static_cast<size_t>(r * shape[1] + c)]; }

  float& operator[](int64_t i) { return data[static_cast<size_t>(i)]; }
  float operator[](int64_t i) const { return data[static_cast<size_t>(i)]; }

  void require_rank(int r) const {
    if (rank() != r) {
      throw std::invalid_argument("expected rank-" + std::to_string(r) + " tensor, got rank-" +
                                  std::to_string(rank()));
    }
  }
};

// Fully connected layer; weight is [out, in], bias is [out].
struct DenseLayer {
  Tensor weight;
  Tensor bias;

  DenseLayer() = default;
  DenseLayer(int64_t out, int64_t in) : weight({out, in}), bias({out}) {}

  int64_t in_dim() const { return weight.cols(); }
  int64_t out_dim() const { return weight.rows(); }

  void validate() const {
    if (weight.rank() != 2 || bias.rank() != 1 || weight.rows() != bias.dim(0)) {
      throw std::invalid_argument("dense layer weight/bias out-dimensions disagree");
    }
  }
};

inline void require_same_shape(const Tensor& a, const Tensor& b, const char* what) {
  if (a.shape != b.shape) throw std::invalid_argument(std::string(what) + ": shape mismatch");
}

}  // namespace edvit
