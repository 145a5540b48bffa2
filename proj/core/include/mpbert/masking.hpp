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

// MLM example generation with consistent masking across the two streams.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mpbert/mixing.hpp"

namespace mpbert {

enum class MaskMode {
  kMixed,           // consistent sup-phoneme masking, both streams visible
  kPhonemeOnly,     // sup stream neutralized, masking per phoneme
  kMaskAllSup,      // phoneme masking at ratio, every sup token masked
  kMaskAllPhoneme,  // sup masking at ratio, every phoneme masked
};

std::string_view to_string(MaskMode mode);
/// Accepts "mixed", "phoneme-only", "mask-all-sup", "mask-all-phoneme" (underscores allowed).
MaskMode parse_mask_mode(std::string_view name);

enum class MaskAction : std::uint8_t { kNone, kMask, kRandom, kKeep };

struct MaskPolicy {
  double ratio = 0.15;
  double p_mask = 0.8;
  double p_random = 0.1;
  double p_keep = 0.1;
  bool whole_word = true;
  MaskMode mode = MaskMode::kMixed;
  std::uint64_t seed = 0;

  /// Throws ConfigError unless ratio is in [0, 1] and the split sums to 1.
  void validate() const;
};

struct VocabSizes {
  std::size_t phoneme;
  std::size_t sup;
};

/// Corrupted inputs plus everything the MLM heads need to score them.
struct MaskedExample {
  std::vector<PhonemeId> input_phoneme_ids;
  std::vector<SupPhonemeId> input_sup_ids_upsampled;
  std::vector<PhonemeId> target_phoneme_ids;  // per position, the originals
  std::vector<SupPhonemeId> target_sup_ids;   // per sup token, the originals
  std::vector<SupSpan> sup_spans;
  std::vector<WordSpan> word_spans;
  std::vector<std::uint8_t> sup_masked;  // per sup token
  std::vector<std::uint8_t> pos_masked;  // per position
  std::vector<MaskAction> sup_actions;   // per sup token, kNone when unmasked
  std::vector<MaskAction> pos_actions;   // per position, kNone when unmasked
  MaskMode mode = MaskMode::kMixed;

  std::size_t length() const { return input_phoneme_ids.size(); }
  std::size_t masked_positions() const;
  std::size_t masked_sup_tokens() const;

  friend bool operator==(const MaskedExample&, const MaskedExample&) = default;
};

/// An unmasked example: inputs equal the originals and nothing is scored.
MaskedExample unmasked_example(const MixedSequence& seq);

/// Draws a masked example. Without whole-word masking every non-special sup
/// token (or position, in the phoneme-level modes) is selected with
/// probability `ratio`; with it the draw is made once per word and a hit masks
/// the whole word, so each token's marginal selection probability is still `ratio`.
/// Identical (seq, policy) gives an identical example.
MaskedExample select_masks(const MixedSequence& seq, const MaskPolicy& policy,
                           const VocabSizes& vocab);

/// Applies a given sup-token selection (promoted to whole words when
/// policy.whole_word) in the sup-level modes. Actions are drawn from the policy
/// split unless `forced_action` is given. Used to reproduce hand-made cases.
MaskedExample apply_sup_selection(const MixedSequence& seq, const MaskPolicy& policy,
                                  const VocabSizes& vocab, std::span<const std::uint8_t> selected,
                                  std::optional<MaskAction> forced_action = std::nullopt);

struct MaskStatistics {
  std::size_t candidates = 0;  // non-special units that could be masked
  std::size_t masked = 0;
  double masked_fraction = 0.0;
  /// Fractions of masked units per action; NaN when nothing was masked.
  double mask_fraction = 0.0;
  double random_fraction = 0.0;
  double keep_fraction = 0.0;
};

/// Units are sup tokens in the sup-level modes and positions in the
/// phoneme-level modes. Throws EmptyInput for an empty collection.
MaskStatistics mask_statistics(std::span<const MaskedExample> examples);

/// Empty when the example satisfies the consistency rules of its mode
/// (mixed: sup token masked <=> all span positions masked, nothing else masked;
/// specials never masked; whole-word closure when `whole_word`).
std::string check_mask_consistency(const MaskedExample& ex, bool whole_word);

}  // namespace mpbert
