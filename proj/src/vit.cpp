#include "edvit/vit.hpp"

#include <cmath>
#include <stdexcept>

#include "edvit/kernels.hpp"
#include "edvit/rng.hpp"

namespace edvit {

void ViTConfig::validate() const {
  if (depth < 1 || dim < 1 || heads < 1 || ffn_hidden < 1) {
    throw std::invalid_argument("vit config: depth/dim/heads/ffn_hidden must be positive");
  }
  if (dim % heads != 0) throw std::invalid_argument("vit config: dim not divisible by heads");
  if (image_size < 1 || patch_size < 1 || image_size % patch_size != 0) {
    throw std::invalid_argument("vit config: patch size must divide image size");
  }
  if (channels < 1 || num_classes < 1) {
    throw std::invalid_argument("vit config: channels/num_classes must be positive");
  }
}

ViTConfig ViTConfig::vit_small(int num_classes) {
  return ViTConfig{12, 384, 6, 1536, 224, 16, 3, num_classes};
}
ViTConfig ViTConfig::vit_base(int num_classes) {
  return ViTConfig{12, 768, 12, 3072, 224, 16, 3, num_classes};
}
ViTConfig ViTConfig::vit_large(int num_classes) {
  return ViTConfig{24, 1024, 16, 4096, 224, 16, 3, num_classes};
}
ViTConfig ViTConfig::tiny(int num_classes) {
  return ViTConfig{2, 32, 4, 64, 32, 16, 1, num_classes};
}

ViTConfig ViTConfig::preset(const std::string& name, int num_classes) {
  if (name == "vit-small") return vit_small(num_classes);
  if (name == "vit-base") return vit_base(num_classes);
  if (name == "vit-large") return vit_large(num_classes);
  if (name == "tiny") return tiny(num_classes);
  throw std::invalid_argument("unknown model preset: " + name);
}

ViTConfig pruned_config(const ViTConfig& base, int hp, int head_out) {
  base.validate();
  if (hp < 0 || hp >= base.heads) {
    throw std::invalid_argument("pruning would eliminate all heads (hp=" + std::to_string(hp) +
                                ", h=" + std::to_string(base.heads) + ")");
  }
  double s = static_cast<double>(base.heads - hp) / static_cast<double>(base.heads);
  ViTConfig out = base;
  out.dim = static_cast<int>(std::llround(s * base.dim));
  out.heads = base.heads - hp;
  out.ffn_hidden = static_cast<int>(std::llround(s * base.ffn_hidden));
  out.num_classes = head_out;
  if (out.dim < 1 || out.ffn_hidden < 1) {
    throw std::invalid_argument("pruned widths collapse below one unit");
  }
  return out;
}

std::vector<const Tensor*> weight_tensors(const ViTWeights& w) {
  std::vector<const Tensor*> ts;
  ts.push_back(&w.patch_embed.weight);
  ts.push_back(&w.patch_embed.bias);
  ts.push_back(&w.cls_token);
  ts.push_back(&w.pos_embed);
  for (const auto& b : w.blocks) {
    ts.push_back(&b.norm1_gain);
    ts.push_back(&b.norm1_shift);
    ts.push_back(&b.qkv.weight);
    ts.push_back(&b.qkv.bias);
    ts.push_back(&b.proj.weight);
    ts.push_back(&b.proj.bias);
    ts.push_back(&b.norm2_gain);
    ts.push_back(&b.norm2_shift);
    ts.push_back(&b.ffn1.weight);
    ts.push_back(&b.ffn1.bias);
    ts.push_back(&b.ffn2.weight);
    ts.push_back(&b.ffn2.bias);
  }
  ts.push_back(&w.final_norm_gain);
  ts.push_back(&w.final_norm_shift);
  ts.push_back(&w.head.weight);
  ts.push_back(&w.head.bias);
  return ts;
}

std::vector<Tensor*> weight_tensors(ViTWeights& w) {
  std::vector<Tensor*> ts;
  for (const Tensor* t : weight_tensors(static_cast<const ViTWeights&>(w))) {
    ts.push_back(const_cast<Tensor*>(t));
  }
  return ts;
}

int64_t param_count_from_weights(const ViTWeights& w) {
  int64_t n = 0;
  for (const Tensor* t : weight_tensors(w)) n += t->numel();
  return n;
}

uint64_t weights_checksum(const ViTWeights& w) {
  uint64_t h = 1469598103934665603ULL;  // FNV-1a
  auto mix = [&h](const void* p, size_t n) {
    const unsigned char* b = static_cast<const unsigned char*>(p);
    for (size_t i = 0; i < n; ++i) {
      h ^= b[i];
      h *= 1099511628211ULL;
    }
  };
  for (const Tensor* t : weight_tensors(w)) {
    for (int64_t d : t->shape) mix(&d, sizeof(d));
    mix(t->data.data(), t->data.size() * sizeof(float));
  }
  return h;
}

void validate_weights(const ViTWeights& w) {
  const ViTConfig& c = w.config;
  c.validate();
  auto expect = [](const Tensor& t, std::vector<int64_t> dims, const char* what) {
    if (t.shape != dims) throw std::invalid_argument(std::string("weights: bad shape for ") + what);
  };
  expect(w.patch_embed.weight, {c.dim, c.patch_dim()}, "patch_embed.weight");
  expect(w.patch_embed.bias, {c.dim}, "patch_embed.bias");
  expect(w.cls_token, {c.dim}, "cls_token");
  expect(w.pos_embed, {c.tokens(), c.dim}, "pos_embed");
  if (static_cast<int>(w.blocks.size()) != c.depth) {
    throw std::invalid_argument("weights: block count != depth");
  }
  for (const auto& b : w.blocks) {
    const int64_t att = b.qkv.weight.rows() / 3;
    if (att * 3 != b.qkv.weight.rows() || att % c.heads != 0) {
      throw std::invalid_argument("weights: qkv width not a multiple of head count");
    }
    expect(b.norm1_gain, {c.dim}, "norm1_gain");
    expect(b.norm1_shift, {c.dim}, "norm1_shift");
    expect(b.qkv.weight, {3 * att, c.dim}, "qkv.weight");
    expect(b.qkv.bias, {3 * att}, "qkv.bias");
    expect(b.proj.weight, {c.dim, att}, "proj.weight");
    expect(b.proj.bias, {c.dim}, "proj.bias");
    expect(b.norm2_gain, {c.dim}, "norm2_gain");
    expect(b.norm2_shift, {c.dim}, "norm2_shift");
    expect(b.ffn1.weight, {c.ffn_hidden, c.dim}, "ffn1.weight");
    expect(b.ffn1.bias, {c.ffn_hidden}, "ffn1.bias");
    expect(b.ffn2.weight, {c.dim, c.ffn_hidden}, "ffn2.weight");
    expect(b.ffn2.bias, {c.dim}, "ffn2.bias");
  }
  expect(w.final_norm_gain, {c.dim}, "final_norm_gain");
  expect(w.final_norm_shift, {c.dim}, "final_norm_shift");
  expect(w.head.weight, {c.num_classes, c.dim}, "head.weight");
  expect(w.head.bias, {c.num_classes}, "head.bias");
}

namespace {

void fill_normal(Tensor& t, Rng& rng, float stddev) {
  for (float& v : t.data) v = rng.normal(stddev);
}

void fill_const(Tensor& t, float v) {
  for (float& x : t.data) x = v;
}

}  // namespace

ViTWeights build_random(const ViTConfig& config, uint64_t seed) {
  config.validate();
  constexpr float kInitStd = 0.02f;
  Rng rng(seed);
  ViTWeights w;
  w.config = config;
  const int d = config.dim, c = config.ffn_hidden, p = config.tokens();
  w.patch_embed = DenseLayer(d, config.patch_dim());
  fill_normal(w.patch_embed.weight, rng, kInitStd);
  w.cls_token = Tensor({d});
  fill_normal(w.cls_token, rng, kInitStd);
  w.pos_embed = Tensor({p, d});
  fill_normal(w.pos_embed, rng, kInitStd);
  w.blocks.resize(static_cast<size_t>(config.depth));
  for (auto& b : w.blocks) {
    b.norm1_gain = Tensor({d});
    fill_const(b.norm1_gain, 1.0f);
    b.norm1_shift = Tensor({d});
    b.qkv = DenseLayer(3 * d, d);
    fill_normal(b.qkv.weight, rng, kInitStd);
    b.proj = DenseLayer(d, d);
    fill_normal(b.proj.weight, rng, kInitStd);
    b.norm2_gain = Tensor({d});
    fill_const(b.norm2_gain, 1.0f);
    b.norm2_shift = Tensor({d});
    b.ffn1 = DenseLayer(c, d);
    fill_normal(b.ffn1.weight, rng, kInitStd);
    b.ffn2 = DenseLayer(d, c);
    fill_normal(b.ffn2.weight, rng, kInitStd);
  }
  w.final_norm_gain = Tensor({d});
  fill_const(w.final_norm_gain, 1.0f);
  w.final_norm_shift = Tensor({d});
  w.head = DenseLayer(config.num_classes, d);
  fill_normal(w.head.weight, rng, kInitStd);
  return w;
}

Tensor patchify(const Tensor& image, const ViTConfig& config) {
  image.require_rank(3);
  if (image.dim(0) != config.channels || image.dim(1) != config.image_size ||
      image.dim(2) != config.image_size) {
    throw std::invalid_argument("patchify: image dims do not match config");
  }
  const int g = config.grid(), ps = config.patch_size, ch = config.channels;
  const int64_t hw = static_cast<int64_t>(config.image_size) * config.image_size;
  Tensor out({static_cast<int64_t>(g) * g, config.patch_dim()});
  for (int py = 0; py < g; ++py) {
    for (int px = 0; px < g; ++px) {
      float* dst = &out.data[static_cast<size_t>((py * g + px) * config.patch_dim())];
      int64_t k = 0;
      for (int cidx = 0; cidx < ch; ++cidx) {
        for (int y = 0; y < ps; ++y) {
          const int64_t row = static_cast<int64_t>(py) * ps + y;
          const float* src =
              &image.data[static_cast<size_t>(cidx * hw + row * config.image_size + px * ps)];
          for (int x = 0; x < ps; ++x) dst[k++] = src[x];
        }
      }
    }
  }
  return out;
}

namespace {

void zero_column(Tensor& x, int64_t col) {
  for (int64_t r = 0; r < x.rows(); ++r) x.at(r, col) = 0.0f;
}

// Multi-head self-attention over pre-normed tokens y [p, d]; att width and
// head size come from the block's own tensor shapes.
Tensor attention(const BlockWeights& b, const Tensor& y, int heads, const ScoreMask* mask,
                 int block_idx) {
  const int64_t p = y.rows();
  const int64_t att = b.qkv.weight.rows() / 3;
  const int64_t dh = att / heads;
  Tensor qkv = linear(y, b.qkv);  // [p, 3*att]
  if (mask && mask->stage == ScoreMask::Stage::attention && mask->block == block_idx) {
    zero_column(qkv, mask->unit);
    zero_column(qkv, att + mask->unit);
    zero_column(qkv, 2 * att + mask->unit);
  }
  const float scale = 1.0f / std::sqrt(static_cast<float>(dh));
  Tensor concat({p, att});
#pragma omp parallel for schedule(static)
  for (int h = 0; h < heads; ++h) {
    const int64_t off = static_cast<int64_t>(h) * dh;
    Tensor scores({p, p});
    for (int64_t i = 0; i < p; ++i) {
      for (int64_t j = 0; j < p; ++j) {
        float acc = 0.0f;
        for (int64_t t = 0; t < dh; ++t) {
          acc += qkv.at(i, off + t) * qkv.at(j, att + off + t);
        }
        scores.at(i, j) = acc * scale;
      }
    }
    Tensor probs = softmax_rows(scores);
    for (int64_t i = 0; i < p; ++i) {
      for (int64_t t = 0; t < dh; ++t) {
        float acc = 0.0f;
        for (int64_t j = 0; j < p; ++j) {
          acc += probs.at(i, j) * qkv.at(j, 2 * att + off + t);
        }
        concat.at(i, off + t) = acc;
      }
    }
  }
  return linear(concat, b.proj);
}

Tensor forward_tokens(const ViTWeights& w, const Tensor& image, const ScoreMask* mask) {
  const ViTConfig& c = w.config;
  Tensor patches = patchify(image, c);
  const int64_t p = c.tokens(), d = c.dim;
  Tensor embedded = linear(patches, w.patch_embed);  // [p-1, d]
  Tensor x({p, d});
  for (int64_t j = 0; j < d; ++j) x.at(0, j) = w.cls_token[j] + w.pos_embed.at(0, j);
  for (int64_t t = 1; t < p; ++t) {
    for (int64_t j = 0; j < d; ++j) x.at(t, j) = embedded.at(t - 1, j) + w.pos_embed.at(t, j);
  }
  const bool mask_res = mask && mask->stage == ScoreMask::Stage::residual;
  if (mask_res) zero_column(x, mask->unit);
  for (size_t bi = 0; bi < w.blocks.size(); ++bi) {
    const BlockWeights& b = w.blocks[bi];
    Tensor y = layer_norm(x, b.norm1_gain, b.norm1_shift);
    Tensor a = attention(b, y, c.heads, mask, static_cast<int>(bi));
    for (int64_t i = 0; i < x.numel(); ++i) x[i] += a[i];
    if (mask_res) zero_column(x, mask->unit);
    y = layer_norm(x, b.norm2_gain, b.norm2_shift);
    Tensor hidden = gelu(linear(y, b.ffn1));
    if (mask && mask->stage == ScoreMask::Stage::ffn && mask->block == static_cast<int>(bi)) {
      zero_column(hidden, mask->unit);
    }
    Tensor f = linear(hidden, b.ffn2);
    for (int64_t i = 0; i < x.numel(); ++i) x[i] += f[i];
    if (mask_res) zero_column(x, mask->unit);
  }
  return layer_norm(x, w.final_norm_gain, w.final_norm_shift);
}

}  // namespace

Tensor forward_embedding(const ViTWeights& w, const Tensor& image, const ScoreMask* mask) {
  Tensor tokens = forward_tokens(w, image, mask);
  Tensor emb({w.config.dim});
  for (int64_t j = 0; j < w.config.dim; ++j) emb[j] = tokens.at(0, j);
  return emb;
}

Tensor forward_logits(const ViTWeights& w, const Tensor& image, const ScoreMask* mask) {
  Tensor emb = forward_embedding(w, image, mask);
  Tensor row({1, w.config.dim});
  row.data = emb.data;
  Tensor out = linear(row, w.head);
  Tensor logits({w.config.num_classes});
  logits.data = out.data;
  return logits;
}

}  // namespace edvit
