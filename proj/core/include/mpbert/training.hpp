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

// Desk-scale MLM pre-training, evaluation and unmasked embedding export.

#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "mpbert/bpe.hpp"
#include "mpbert/encoder.hpp"
#include "mpbert/frontend.hpp"
#include "mpbert/masking.hpp"
#include "mpbert/mixing.hpp"
#include "mpbert/model_config.hpp"

namespace mpbert {

struct Corpus {
  std::vector<MixedSequence> train;
  std::vector<MixedSequence> heldout;
  std::size_t skipped = 0;  // lines that normalized to nothing
};

/// Sentences with FNV-1a(sentence) % 100 below this go to the held-out split.
inline constexpr std::uint64_t kHeldoutPercent = 5;

std::uint64_t fnv1a(std::string_view bytes);

/// Normalize -> G2P -> mixed sequence. Sentences longer than max_len are
/// truncated at the last word boundary that fits. With `split` off every
/// sentence lands in `train`.
Corpus prepare_corpus(const std::vector<std::string>& sentences, const Lexicon& lexicon,
                      const MergeTable& table, std::size_t max_len, bool split = true);

/// Drops trailing words until BOS + phonemes + EOS fits in max_len (at least one word kept).
std::vector<WordPronunciation> truncate_to_fit(std::vector<WordPronunciation> prons,
                                               std::size_t max_len);

/// Word frequencies (as phoneme symbols) for BPE learning; OOV words are skipped.
WordFreqs collect_word_freqs(const std::vector<std::string>& sentences, const Lexicon& lexicon);

struct TrainConfig {
  std::size_t steps = 1000;
  std::size_t batch_size = 32;
  double peak_lr = 5e-4;
  std::size_t warmup_steps = 100;
  double beta1 = 0.9;
  double beta2 = 0.98;
  double epsilon = 1e-6;
  double weight_decay = 0.01;
  std::uint64_t seed = 0;
  std::size_t eval_every = 0;  // 0 disables periodic evaluation
  MaskPolicy policy;           // mask mode / ratio / WWM used for training batches

  /// Desk defaults with warmup at 10% of the steps.
  static TrainConfig desk(std::size_t steps);
  void validate() const;
};

/// Linear warmup to peak_lr, then linear decay towards 0. Steps are 1-based.
double learning_rate(const TrainConfig& config, std::size_t step);

struct LossRecord {
  std::size_t step;
  double loss_total;
  double loss_phoneme;
  double loss_sup;
  double lr;
};

struct MlmReport {
  double acc_phoneme = 0.0;
  double acc_sup = 0.0;
  double loss_phoneme = 0.0;  // means over examples
  double loss_sup = 0.0;
  double loss_total = 0.0;
  std::size_t phoneme_targets = 0;
  std::size_t sup_targets = 0;
  std::size_t phoneme_correct = 0;
  std::size_t sup_correct = 0;
  std::size_t examples = 0;
};

struct TrainResult {
  ModelConfig config;
  EncoderParams params;
  std::vector<LossRecord> curve;
  std::vector<std::pair<std::size_t, MlmReport>> evaluations;  // (step, held-out report)
};

/// Observer called after every step with the record just appended; returning
/// false stops training early.
using StepCallback = std::function<bool(const LossRecord&, const EncoderParams&)>;

/// Adam (decoupled weight decay on weight matrices only) over mean per-example
/// gradients. Fully determined by the inputs and train_config.seed. Throws
/// NumericalError carrying the step index when the loss becomes non-finite.
TrainResult train(const Corpus& corpus, const ModelConfig& model_config,
                  const TrainConfig& train_config, const StepCallback& on_step = {});

/// Same, starting from given parameters.
TrainResult train_from(const Corpus& corpus, const ModelConfig& model_config,
                       EncoderParams params, const TrainConfig& train_config,
                       const StepCallback& on_step = {});

/// Accuracy = argmax hits / masked targets per stream; example i is masked
/// with seed derive_seed(policy.seed, i).
MlmReport eval_mlm(const EncoderParams& params, const ModelConfig& config,
                   const std::vector<MixedSequence>& sequences, const MaskPolicy& policy);

void write_loss_csv(const std::vector<LossRecord>& curve, std::ostream& out);
std::string report_to_json(const MlmReport& report, const MaskPolicy& policy,
                           const ModelConfig& config);

struct EmbeddingExport {
  MixedSequence sequence;
  std::vector<std::string> phonemes;  // per row
  Matrix hidden;                      // T x H
};

/// Unmasked inference-mode encoding of a text. Throws EmptySentence /
/// SequenceTooLong.
EmbeddingExport export_embeddings(const EncoderParams& params, const ModelConfig& config,
                                  std::string_view text, const Lexicon& lexicon,
                                  const MergeTable& table);

std::string export_to_json(const EmbeddingExport& ex, const MergeTable& table);

}  // namespace mpbert
