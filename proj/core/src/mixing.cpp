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

#include "mpbert/mixing.hpp"

#include <string>

#include "mpbert/errors.hpp"

namespace mpbert {

MixedSequence build_mixed_sequence(const std::vector<WordPronunciation>& prons,
                                   const PhonemeVocab& vocab, const MergeTable& table,
                                   std::size_t max_len) {
  if (prons.empty()) throw DataError("cannot build a sequence from zero words");
  std::size_t total = 2;
  for (const auto& p : prons) total += p.phonemes.size();
  if (total > max_len) throw SequenceTooLong(total, max_len);

  MixedSequence seq;
  seq.phoneme_ids.reserve(total);
  seq.sup_ids_upsampled.reserve(total);

  auto push_single = [&seq](std::int32_t special_id) {
    const std::size_t pos = seq.phoneme_ids.size();
    const std::size_t sup_index = seq.sup_spans.size();
    seq.phoneme_ids.push_back(special_id);
    seq.sup_ids_upsampled.push_back(special_id);
    seq.sup_spans.push_back({special_id, pos, pos + 1});
    seq.word_spans.push_back({sup_index, sup_index + 1});
  };

  push_single(special::kBos);
  for (const auto& word : prons) {
    if (word.phonemes.empty()) throw DataError("word '" + word.surface + "' has no phonemes");
    const std::size_t first_sup = seq.sup_spans.size();
    std::size_t pos = seq.phoneme_ids.size();
    for (const auto& token : encode_word(word.phonemes, vocab, table)) {
      seq.sup_spans.push_back({token.id, pos, pos + token.span_len});
      for (std::size_t i = 0; i < token.span_len; ++i) seq.sup_ids_upsampled.push_back(token.id);
      pos += token.span_len;
    }
    seq.phoneme_ids.insert(seq.phoneme_ids.end(), word.phonemes.begin(), word.phonemes.end());
    seq.word_spans.push_back({first_sup, seq.sup_spans.size()});
  }
  push_single(special::kEos);
  return seq;
}

std::string validate_mixed_sequence(const MixedSequence& seq, const PhonemeVocab& vocab,
                                    const MergeTable& table) {
  const std::size_t T = seq.phoneme_ids.size();
  if (seq.sup_ids_upsampled.size() != T) return "stream lengths differ";
  std::size_t cursor = 0;
  for (std::size_t j = 0; j < seq.sup_spans.size(); ++j) {
    const auto& span = seq.sup_spans[j];
    if (span.start != cursor || span.end <= span.start || span.end > T) {
      return "sup span " + std::to_string(j) + " is not contiguous";
    }
    if (!table.contains(span.sup_id)) return "sup span " + std::to_string(j) + " has unknown id";
    const auto& dec = table.decompose(span.sup_id);
    if (dec.size() != span.length()) return "sup span " + std::to_string(j) + " length mismatch";
    for (std::size_t t = span.start; t < span.end; ++t) {
      if (seq.sup_ids_upsampled[t] != span.sup_id) return "up-sampled id mismatch at " + std::to_string(t);
      if (vocab.symbol(seq.phoneme_ids[t]) != dec[t - span.start]) {
        return "alignment mismatch at position " + std::to_string(t);
      }
    }
    cursor = span.end;
  }
  if (cursor != T) return "sup spans do not cover the sequence";
  std::size_t next_sup = 0;
  for (const auto& w : seq.word_spans) {
    if (w.first_sup != next_sup || w.last_sup <= w.first_sup) return "word spans do not partition";
    next_sup = w.last_sup;
  }
  if (next_sup != seq.sup_spans.size()) return "word spans do not cover the sup tokens";
  if (T < 2 || seq.phoneme_ids.front() != special::kBos || seq.phoneme_ids.back() != special::kEos) {
    return "missing BOS/EOS";
  }
  if (seq.word_spans.front().last_sup != 1 || seq.word_spans.back().first_sup + 1 != seq.sup_spans.size()) {
    return "BOS/EOS must be single-token words";
  }
  return {};
}

Matrix embed(const std::vector<PhonemeId>& phoneme_ids,
             const std::vector<SupPhonemeId>& sup_ids, const EmbeddingTables& tables) {
  const auto T = static_cast<Eigen::Index>(phoneme_ids.size());
  if (sup_ids.size() != phoneme_ids.size()) throw IndexError("stream lengths differ");
  if (T > tables.position.rows()) {
    throw IndexError("position " + std::to_string(T - 1) + " outside the position table");
  }
  Matrix out(T, tables.phoneme.cols());
  for (Eigen::Index t = 0; t < T; ++t) {
    const auto p = phoneme_ids[static_cast<std::size_t>(t)];
    const auto s = sup_ids[static_cast<std::size_t>(t)];
    if (p < 0 || p >= tables.phoneme.rows()) throw IndexError("phoneme id " + std::to_string(p) + " out of range");
    if (s < 0 || s >= tables.sup.rows()) throw IndexError("sup-phoneme id " + std::to_string(s) + " out of range");
    out.row(t) = tables.phoneme.row(p) + tables.sup.row(s) + tables.position.row(t);
  }
  return out;
}

}  // namespace mpbert
