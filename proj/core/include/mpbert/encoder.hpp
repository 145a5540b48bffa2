// Copyright 2026 The mpbert Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// FFT-block Transformer encoder with phoneme and sup-phoneme MLM heads, and
// the hand-written backward pass for all of it.
//
// One block (post-LN):
//   y   = LayerNorm(x + MultiHeadSelfAttention(x))
//   out = LayerNorm(y + Conv_k2(ReLU(Conv_k1(y))))
// The convolutions run over the time axis with zero "same" padding.

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mpbert/masking.hpp"
#include "mpbert/mixing.hpp"
#include "mpbert/model_config.hpp"
#include "mpbert/tensor.hpp"

namespace mpbert {

struct LayerParams {
  Matrix wq, wk, wv, wo;  // H x H
  Matrix bq, bk, bv, bo;  // 1 x H
  Matrix ln1_gain, ln1_bias;
  Matrix conv1_w;  // (k1 * H) x F, tap k occupies rows [k*H, (k+1)*H)
  Matrix conv1_b;  // 1 x F
  Matrix conv2_w;  // (k2 * F) x H
  Matrix conv2_b;  // 1 x H
  Matrix ln2_gain, ln2_bias;
};

/// All trainable tensors. Also used to hold gradients (same shapes).
struct EncoderParams {
  EmbeddingTables embeddings;
  std::vector<LayerParams> layers;
  Matrix phoneme_head_w;  // H x |phoneme vocab|
  Matrix phoneme_head_b;  // 1 x |phoneme vocab|
  Matrix sup_head_w;      // H x |sup vocab|
  Matrix sup_head_b;      // 1 x |sup vocab|

  /// Visits every tensor in a fixed order with a stable dotted name.
  void visit(const std::function<void(const std::string&, Matrix&)>& fn);
  void visit(const std::function<void(const std::string&, const Matrix&)>& fn) const;

  std::size_t parameter_count() const;
  bool all_finite() const;
};

struct TensorShape {
  std::string name;
  std::size_t rows;
  std::size_t cols;
};

/// Shapes of every tensor for a config, in visit order, without allocating.
std::vector<TensorShape> param_shapes(const ModelConfig& config);

/// All-zero tensors of the right shapes.
EncoderParams zero_params(const ModelConfig& config);

/// Weights ~ N(0, 0.02^2), biases 0, layer-norm gains 1.
EncoderParams init_params(const ModelConfig& config, std::uint64_t seed);

/// Throws ConfigError when a tensor does not match its configured shape.
void check_shapes(const EncoderParams& params, const ModelConfig& config);

struct LayerCache {
  Matrix input;
  Matrix q, k, v;
  std::vector<Matrix> probs;       // per head, softmax output
  std::vector<Matrix> attn_keep;   // per head, dropout scale (empty when inactive)
  Matrix context;                  // concatenated heads
  Matrix ln1_xhat;
  Eigen::VectorXd ln1_inv_std;
  Matrix y;
  Matrix conv1_pre;                // before ReLU
  Matrix conv1_keep;               // dropout scale (empty when inactive)
  Matrix ff_hidden;                // ReLU output after dropout
  Matrix conv2_keep;
  Matrix ln2_xhat;
  Eigen::VectorXd ln2_inv_std;
};

struct ForwardCache {
  std::vector<PhonemeId> phoneme_ids;
  std::vector<SupPhonemeId> sup_ids;
  std::vector<LayerCache> layers;
  Matrix hidden;
};

/// Runs the encoder on input streams. Dropout is active only when train_mode
/// is set and config.dropout > 0, drawn from `dropout_seed`. Throws
/// NumericalError (with the layer index) on a non-finite activation and
/// IndexError / SequenceTooLong for bad inputs.
Matrix encoder_forward(const std::vector<PhonemeId>& phoneme_ids,
                       const std::vector<SupPhonemeId>& sup_ids, const EncoderParams& params,
                       const ModelConfig& config, bool train_mode, std::uint64_t dropout_seed = 0,
                       ForwardCache* cache = nullptr);

inline Matrix encoder_forward(const MaskedExample& ex, const EncoderParams& params,
                              const ModelConfig& config, bool train_mode,
                              std::uint64_t dropout_seed = 0) {
  return encoder_forward(ex.input_phoneme_ids, ex.input_sup_ids_upsampled, params, config,
                         train_mode, dropout_seed);
}

inline Matrix encoder_forward(const MixedSequence& seq, const EncoderParams& params,
                              const ModelConfig& config) {
  return encoder_forward(seq.phoneme_ids, seq.sup_ids_upsampled, params, config, false);
}

struct MlmOutput {
  Matrix phoneme_logits;  // masked positions x |phoneme vocab|
  Matrix sup_logits;      // masked sup tokens x |sup vocab|
  std::vector<std::size_t> phoneme_positions;  // row -> position
  std::vector<std::size_t> sup_tokens;         // row -> sup-token index
  std::vector<PhonemeId> phoneme_targets;
  std::vector<SupPhonemeId> sup_targets;
  double loss_phoneme = 0.0;
  double loss_sup = 0.0;
  double loss_total = 0.0;
  std::size_t phoneme_correct = 0;
  std::size_t sup_correct = 0;
};

/// Phoneme head on every masked position; sup head on the mean of the hidden
/// rows of each masked sup token's masked positions. Each loss is the mean
/// cross-entropy over its targets (0 when there are none); the total is their sum.
MlmOutput mlm_heads(const Matrix& hidden, const MaskedExample& ex, const EncoderParams& params);

/// Forward + heads + exact backward. Adds `scale` times the gradient of
/// loss_total into `grad` (which must have the shapes of `params`).
MlmOutput accumulate_gradients(const MaskedExample& ex, const EncoderParams& params,
                               const ModelConfig& config, EncoderParams& grad,
                               double scale = 1.0, bool train_mode = false,
                               std::uint64_t dropout_seed = 0);

struct LossAndGradient {
  MlmOutput output;
  EncoderParams gradient;
};

/// Convenience wrapper returning a fresh gradient set.
LossAndGradient backward(const MaskedExample& ex, const EncoderParams& params,
                         const ModelConfig& config, bool train_mode = false,
                         std::uint64_t dropout_seed = 0);

/// Loss only (inference mode); used by finite-difference checks.
double mlm_loss(const MaskedExample& ex, const EncoderParams& params, const ModelConfig& config);

}  // namespace mpbert
