#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "edvit/tensor.hpp"

namespace edvit {

// Architecture hyperparameters of a (possibly pruned) ViT. After pruning,
// dim/heads/ffn_hidden shrink while patch geometry stays fixed; the
// per-head width dim/heads is preserved by construction.
struct ViTConfig {
  int depth = 0;
  int dim = 0;         // residual stream width d
  int heads = 0;       // attention head count h
  int ffn_hidden = 0;  // FFN hidden width c
  int image_size = 0;
  int patch_size = 0;
  int channels = 0;
  int num_classes = 0;

  int grid() const { return image_size / patch_size; }
  int tokens() const { return grid() * grid() + 1; }  // class token included
  int patch_dim() const { return patch_size * patch_size * channels; }

  void validate() const;

  static ViTConfig vit_small(int num_classes = 1000);
  static ViTConfig vit_base(int num_classes = 1000);
  static ViTConfig vit_large(int num_classes = 1000);
  // Desk-scale model used by the synthetic end-to-end runs.
  static ViTConfig tiny(int num_classes = 8);
  static ViTConfig preset(const std::string& name, int num_classes);
};

// Widths of the sub-model obtained by pruning hp of the h head-groups:
// keep fraction s = (h - hp) / h, d' = round(s*d), h' = h - hp,
// c' = round(s*c). head_out is the classifier output width.
ViTConfig pruned_config(const ViTConfig& base, int hp, int head_out);

struct BlockWeights {
  Tensor norm1_gain, norm1_shift;  // [d]
  DenseLayer qkv;                  // [3*att, d], att = heads * head_dim
  DenseLayer proj;                 // [d, att]
  Tensor norm2_gain, norm2_shift;  // [d]
  DenseLayer ffn1;                 // [c, d]
  DenseLayer ffn2;                 // [d, c]
};

struct ViTWeights {
  ViTConfig config;
  DenseLayer patch_embed;  // [d, patch_dim]
  Tensor cls_token;        // [d]
  Tensor pos_embed;        // [tokens, d]
  std::vector<BlockWeights> blocks;
  Tensor final_norm_gain, final_norm_shift;  // [d]
  DenseLayer head;                           // [num_classes, d]
};

// Tensors in persistence/declaration order.
std::vector<const Tensor*> weight_tensors(const ViTWeights& w);
std::vector<Tensor*> weight_tensors(ViTWeights& w);

int64_t param_count_from_weights(const ViTWeights& w);
uint64_t weights_checksum(const ViTWeights& w);
void validate_weights(const ViTWeights& w);

// Seeded init: dense weights, class token and positional embedding are
// N(0, 0.02^2); biases and norm shifts zero; norm gains one.
ViTWeights build_random(const ViTConfig& config, uint64_t seed);

// [channels, H, W] -> [tokens-1, patch_dim]; patches in grid row-major
// order, each flattened channel-major then row-major.
Tensor patchify(const Tensor& image, const ViTConfig& config);

// Zeroes the contribution of one prunable unit during importance scoring.
// residual: unit = stream channel (applies to every block);
// attention: unit = q/k/v dim of one block; ffn: unit = hidden dim of one block.
struct ScoreMask {
  enum class Stage { residual, attention, ffn };
  Stage stage;
  int block = 0;  // ignored for residual
  int unit = 0;
};

Tensor forward_logits(const ViTWeights& w, const Tensor& image, const ScoreMask* mask = nullptr);
Tensor forward_embedding(const ViTWeights& w, const Tensor& image, const ScoreMask* mask = nullptr);

}  // namespace edvit
