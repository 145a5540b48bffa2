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

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace mpbert {

using PhonemeId = std::int32_t;
using SupPhonemeId = std::int32_t;

/// Reserved leading ids shared by the phoneme and sup-phoneme vocabularies.
namespace special {
inline constexpr std::int32_t kPad = 0;
inline constexpr std::int32_t kUnk = 1;
inline constexpr std::int32_t kBos = 2;
inline constexpr std::int32_t kEos = 3;
inline constexpr std::int32_t kMask = 4;
inline constexpr std::int32_t kCount = 5;

inline constexpr std::array<std::string_view, kCount> kSymbols = {"<pad>", "<unk>", "<bos>",
                                                                 "<eos>", "<mask>"};

constexpr bool is_special(std::int32_t id) { return id >= 0 && id < kCount; }
}  // namespace special

struct PunctuationMark {
  char mark;
  std::string_view phoneme;
};

/// The punctuation marks kept by the normalizer, each with its dedicated phoneme.
inline constexpr std::array<PunctuationMark, 7> kPunctuation = {{
    {'.', "PUNCT_PERIOD"},
    {',', "PUNCT_COMMA"},
    {'!', "PUNCT_EXCLAIM"},
    {'?', "PUNCT_QUESTION"},
    {';', "PUNCT_SEMICOLON"},
    {':', "PUNCT_COLON"},
    {'\'', "PUNCT_APOSTROPHE"},
}};

/// Ordered phoneme inventory. Specials occupy ids [0, special::kCount); the
/// remaining "base" symbols follow in a fixed order.
class PhonemeVocab {
 public:
  PhonemeVocab() : PhonemeVocab(std::vector<std::string>{}) {}

  /// Builds a vocabulary from base symbols (specials are prepended).
  /// Throws ConfigError on duplicates or on a base symbol that collides with a special.
  explicit PhonemeVocab(std::vector<std::string> base_symbols, bool strip_stress = true);

  /// CMU ARPAbet inventory plus punctuation phonemes. With stress stripping the
  /// 15 vowels appear bare; otherwise each vowel appears with stress 0, 1 and 2.
  static PhonemeVocab arpabet(bool strip_stress = true);

  std::size_t size() const { return symbols_.size(); }
  std::size_t base_size() const { return symbols_.size() - special::kCount; }
  bool strip_stress() const { return strip_stress_; }

  const std::string& symbol(PhonemeId id) const;
  std::optional<PhonemeId> find(std::string_view symbol) const;
  bool contains(std::string_view symbol) const { return find(symbol).has_value(); }

  /// Throws UnknownPhoneme when absent.
  PhonemeId id(std::string_view symbol) const;

  const std::vector<std::string>& symbols() const { return symbols_; }
  std::vector<std::string> base_symbols() const;

  /// Phoneme id for a punctuation mark, if the mark is one the normalizer keeps.
  std::optional<PhonemeId> punctuation(char mark) const;

  friend bool operator==(const PhonemeVocab& a, const PhonemeVocab& b) {
    return a.symbols_ == b.symbols_ && a.strip_stress_ == b.strip_stress_;
  }

 private:
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, PhonemeId> index_;
  bool strip_stress_ = true;
};

/// "AH0" -> "AH"; symbols without a trailing stress digit are returned unchanged.
std::string strip_stress_digit(std::string_view symbol);

}  // namespace mpbert
