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

// Text normalization and lexicon-based grapheme-to-phoneme conversion.

#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "mpbert/phoneme_vocab.hpp"

namespace mpbert {

/// Ordered word and punctuation units. Words are lowercase ASCII letters;
/// punctuation units are single characters from kPunctuation.
struct NormalizedSentence {
  std::vector<std::string> units;

  friend bool operator==(const NormalizedSentence&, const NormalizedSentence&) = default;
};

/// Lowercases, splits punctuation into standalone units, spells digits one by
/// one ("42" -> "four", "two") and drops every other symbol (treated as a word
/// separator). Throws EmptySentence when nothing survives.
NormalizedSentence normalize_text(std::string_view raw);

bool is_punctuation_unit(std::string_view unit);

/// Immutable word -> phoneme-id map; every id is a base symbol of vocab().
class Lexicon {
 public:
  Lexicon() : vocab_(PhonemeVocab::arpabet()) {}
  explicit Lexicon(PhonemeVocab vocab) : vocab_(std::move(vocab)) {}

  /// Adds an entry unless the word is already present (first variant wins).
  /// Returns false when the word was already present. Throws UnknownPhoneme,
  /// or DataError for an empty pronunciation.
  bool add(std::string word, const std::vector<std::string>& phonemes);

  const std::vector<PhonemeId>* find(std::string_view word) const;

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const PhonemeVocab& vocab() const { return vocab_; }
  const std::map<std::string, std::vector<PhonemeId>, std::less<>>& entries() const {
    return entries_;
  }

 private:
  PhonemeVocab vocab_;
  std::map<std::string, std::vector<PhonemeId>, std::less<>> entries_;
};

struct LexiconOptions {
  bool strip_stress = true;
};

/// Reads the CMU-style format: `WORD  PH1 PH2 ...`, `;;;` comments, `WORD(N)`
/// variants skipped after the first. Throws ParseError (with line number) or
/// UnknownPhoneme.
Lexicon load_lexicon(std::istream& in, const LexiconOptions& options = {});
Lexicon load_lexicon(std::istream& in, const PhonemeVocab& vocab);
Lexicon load_lexicon_file(const std::string& path, const LexiconOptions& options = {});

struct WordPronunciation {
  std::string surface;
  std::vector<PhonemeId> phonemes;
  bool is_oov = false;
  bool is_punct = false;

  friend bool operator==(const WordPronunciation&, const WordPronunciation&) = default;
};

/// One pronunciation per unit; OOV words become a single UNK phoneme with is_oov set.
std::vector<WordPronunciation> g2p(const NormalizedSentence& sentence, const Lexicon& lexicon);

/// Reads one raw sentence per line, skipping blank lines.
std::vector<std::string> read_corpus(std::istream& in);
std::vector<std::string> read_corpus_file(const std::string& path);

}  // namespace mpbert
