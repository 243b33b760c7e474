#pragma once

#include <cstdint>

#include "edvit/vit.hpp"

namespace edvit {

// Analytic cost profile of one (sub-)model.
struct CostProfile {
  int64_t params = 0;
  int64_t macs_per_sample = 0;  // FLOPs per inference, one MAC = one FLOP
  int64_t mem_bytes = 0;        // params * 4 (fp32)
  int64_t feature_bytes = 0;    // transmitted embedding payload
};

// FC cost as (2*FC_in + 1) * FC_out.
int64_t fc_macs(int64_t fc_in, int64_t fc_out);

// Attention cost as 3*p*d^2 + 2*p^2*d; h cancels and is kept for symmetry.
int64_t mhsa_macs(int64_t p, int64_t d, int64_t h);

// One fully connected application: tokens * (in*out + out), counting one MAC
// per multiply-accumulate and one per bias add.
int64_t dense_macs(int64_t in, int64_t out, int64_t tokens);

// Per-sample MACs of the whole model: patch embedding, QKV and output
// projections, FFN and classifier head. The parameter-free attention
// score/value products are excluded; the reported per-model totals track
// parameter counts, which only the dense applications do.
int64_t model_macs(const ViTConfig& config);

// Same count derived from actual tensor shapes instead of the config.
int64_t model_macs_from_weights(const ViTWeights& w);

int64_t param_count(const ViTConfig& config);
int64_t mem_bytes(const ViTConfig& config);
double mem_mib(const ViTConfig& config);

CostProfile profile(const ViTConfig& config);

// Embedding payload: 4 bytes per retained channel, round(s*d) channels.
int64_t feature_payload_bytes(int64_t d, double s);

// Raw input size (one byte per pixel-channel), the baseline for the
// communication-reduction ratio.
int64_t input_bytes(const ViTConfig& config);

// Megabit = 2^20 bits; 1536 bytes at 2 Mbps gives 5.86 ms.
double comm_time_seconds(int64_t bytes, double bandwidth_mbps);

}  // namespace edvit
