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

// Byte-pair encoding over phoneme sequences. Phonemes are the base units;
// learned merges produce sup-phoneme tokens that never cross word boundaries.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mpbert/phoneme_vocab.hpp"

namespace mpbert {

struct SupPhonemeToken {
  SupPhonemeId id;
  std::size_t span_len;

  friend bool operator==(const SupPhonemeToken&, const SupPhonemeToken&) = default;
};

using MergePair = std::pair<SupPhonemeId, SupPhonemeId>;

/// Ordered merge rules plus the sup-phoneme vocabulary they induce.
///
/// Id layout: specials [0, 5), then base phoneme symbols in the order given at
/// construction, then one id per merge in learned order. When the base symbols
/// are a PhonemeVocab's base symbols, a base phoneme keeps the same id in both
/// vocabularies.
///
/// Surface forms are lowercase; a merged token's surface is its operands'
/// surfaces joined by '-', e.g. "hh-ah".
class MergeTable {
 public:
  MergeTable() = default;
  explicit MergeTable(std::vector<std::string> base_symbols, bool strip_stress = true);

  /// Base symbols of a phoneme vocabulary.
  static MergeTable for_vocab(const PhonemeVocab& vocab);

  /// Appends a merge rule; both operands must already exist and the pair must be new.
  /// Throws UnknownToken / ConfigError otherwise.
  SupPhonemeId add_merge(SupPhonemeId left, SupPhonemeId right);

  std::size_t size() const { return surfaces_.size(); }
  std::size_t base_size() const { return base_symbols_.size(); }
  const std::vector<std::string>& base_symbols() const { return base_symbols_; }
  const std::vector<MergePair>& merges() const { return merges_; }
  bool strip_stress() const { return strip_stress_; }

  /// Requested size (base + merges) when the table was learned.
  std::size_t target_size() const { return target_size_; }
  void set_target_size(std::size_t n) { target_size_ = n; }

  bool contains(SupPhonemeId id) const {
    return id >= 0 && static_cast<std::size_t>(id) < surfaces_.size();
  }
  const std::string& surface(SupPhonemeId id) const;
  std::optional<SupPhonemeId> find(std::string_view surface) const;

  /// Flat phoneme-symbol expansion; throws UnknownToken for ids outside the vocabulary.
  const std::vector<std::string>& decompose(SupPhonemeId id) const;
  std::size_t span_len(SupPhonemeId id) const { return decompose(id).size(); }

  /// Sup id of a single base phoneme symbol (specials map to themselves).
  std::optional<SupPhonemeId> base_token(std::string_view phoneme_symbol) const;

  /// Rank of a merge rule, if the pair is one.
  std::optional<std::size_t> rank(SupPhonemeId left, SupPhonemeId right) const;

  /// Rule-order encoding of a sequence of base tokens: the earliest-learned
  /// applicable rule is applied left to right at every position, repeatedly,
  /// until no rule applies.
  std::vector<SupPhonemeId> apply_merges(std::vector<SupPhonemeId> tokens) const;

  friend bool operator==(const MergeTable& a, const MergeTable& b) {
    return a.base_symbols_ == b.base_symbols_ && a.merges_ == b.merges_ &&
           a.strip_stress_ == b.strip_stress_ && a.target_size_ == b.target_size_;
  }

 private:
  static std::uint64_t key(SupPhonemeId l, SupPhonemeId r) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(l)) << 32) |
           static_cast<std::uint32_t>(r);
  }
  SupPhonemeId push_token(std::string surface, std::vector<std::string> decomposition);

  std::vector<std::string> base_symbols_;
  std::vector<MergePair> merges_;
  std::vector<std::string> surfaces_;
  std::vector<std::vector<std::string>> decompositions_;
  std::unordered_map<std::string, SupPhonemeId> surface_index_;
  std::unordered_map<std::string, SupPhonemeId> base_index_;
  std::unordered_map<std::uint64_t, std::size_t> ranks_;
  bool strip_stress_ = true;
  std::size_t target_size_ = 0;
};

/// Word (as phoneme symbols) -> corpus frequency.
using WordFreqs = std::map<std::vector<std::string>, std::uint64_t>;

/// Learns merges until base + merges reaches target_size or no adjacent pair
/// occurs at least twice. Pair counts are weighted by word frequency; ties go
/// to the lexicographically smallest (left surface, right surface).
/// Throws ConfigError when target_size < base size, UnknownPhoneme for symbols
/// outside the base, DataError for empty words.
MergeTable learn_bpe(const WordFreqs& word_freqs, std::size_t target_size,
                     std::vector<std::string> base_symbols, bool strip_stress = true);

/// Same, with the base taken as the sorted distinct symbols of the corpus.
MergeTable learn_bpe(const WordFreqs& word_freqs, std::size_t target_size);

/// Encodes one word. UNK phonemes become the UNK sup-phoneme. Concatenated
/// decompositions of the result reproduce the input symbols.
std::vector<SupPhonemeToken> encode_word(std::span<const PhonemeId> phonemes,
                                         const PhonemeVocab& vocab, const MergeTable& table);

/// Encodes a word given directly as phoneme symbols.
std::vector<SupPhonemeToken> encode_symbols(std::span<const std::string> phonemes,
                                            const MergeTable& table);

inline const std::vector<std::string>& decompose(SupPhonemeId id, const MergeTable& table) {
  return table.decompose(id);
}

/// Resolves `--vocab-size`: "3000", "30000", "tiny" (base + 64) or a plain integer.
std::size_t resolve_vocab_size(std::string_view preset, std::size_t base_size);

inline constexpr std::size_t kTinyMerges = 64;
inline constexpr std::size_t kSmallVocabPreset = 3000;
inline constexpr std::size_t kLargeVocabPreset = 30000;

void save_merges(const MergeTable& table, std::ostream& out);
MergeTable load_merges(std::istream& in);
void save_merges_file(const MergeTable& table, const std::string& path);
MergeTable load_merges_file(const std::string& path);

}  // namespace mpbert
