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

// Mixed phoneme / sup-phoneme sequences: alignment, up-sampling and the summed
// input embedding.

#pragma once

#include <cstddef>
#include <vector>

#include "mpbert/bpe.hpp"
#include "mpbert/frontend.hpp"
#include "mpbert/tensor.hpp"

namespace mpbert {

/// A sup-phoneme token placed on the phoneme position axis as [start, end).
struct SupSpan {
  SupPhonemeId sup_id;
  std::size_t start;
  std::size_t end;

  std::size_t length() const { return end - start; }
  friend bool operator==(const SupSpan&, const SupSpan&) = default;
};

/// A word as a half-open range of sup-token indices.
struct WordSpan {
  std::size_t first_sup;
  std::size_t last_sup;  // exclusive

  friend bool operator==(const WordSpan&, const WordSpan&) = default;
};

/// Phoneme stream and up-sampled sup-phoneme stream on one shared position
/// axis, bracketed by BOS/EOS, with the span structure needed for masking and
/// pooling. BOS and EOS each form their own length-1 span and word.
struct MixedSequence {
  std::vector<PhonemeId> phoneme_ids;
  std::vector<SupPhonemeId> sup_ids_upsampled;
  std::vector<SupSpan> sup_spans;
  std::vector<WordSpan> word_spans;

  std::size_t length() const { return phoneme_ids.size(); }
  std::size_t sup_count() const { return sup_spans.size(); }

  friend bool operator==(const MixedSequence&, const MixedSequence&) = default;
};

/// Throws SequenceTooLong when phonemes + 2 exceeds max_len, DataError on empty input.
MixedSequence build_mixed_sequence(const std::vector<WordPronunciation>& prons,
                                   const PhonemeVocab& vocab, const MergeTable& table,
                                   std::size_t max_len);

/// Checks every structural invariant of a MixedSequence against its merge table;
/// returns an empty string when valid, otherwise a description of the first violation.
std::string validate_mixed_sequence(const MixedSequence& seq, const PhonemeVocab& vocab,
                                    const MergeTable& table);

struct EmbeddingTables {
  Matrix phoneme;   // |phoneme vocab| x H
  Matrix sup;       // |sup vocab| x H
  Matrix position;  // max_len x H
};

/// Row t = phoneme[phoneme_ids[t]] + sup[sup_ids[t]] + position[t].
/// Throws IndexError when an id or position is outside its table.
Matrix embed(const std::vector<PhonemeId>& phoneme_ids,
             const std::vector<SupPhonemeId>& sup_ids, const EmbeddingTables& tables);

inline Matrix embed(const MixedSequence& seq, const EmbeddingTables& tables) {
  return embed(seq.phoneme_ids, seq.sup_ids_upsampled, tables);
}

}  // namespace mpbert
