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

#include "mpbert/frontend.hpp"

#include <array>
#include <cctype>
#include <fstream>
#include <istream>
#include <sstream>

#include "mpbert/errors.hpp"

namespace mpbert {
namespace {

constexpr std::array<std::string_view, 10> kDigitWords = {
    "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine"};

bool is_kept_punctuation(char c) {
  for (const auto& p : kPunctuation) {
    if (p.mark == c) return true;
  }
  return false;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

NormalizedSentence normalize_text(std::string_view raw) {
  NormalizedSentence out;
  std::string word;
  auto flush = [&] {
    if (!word.empty()) out.units.push_back(std::move(word));
    word.clear();
  };
  for (char ch : raw) {
    const auto c = static_cast<unsigned char>(ch);
    if (c < 0x80 && std::isalpha(c)) {
      word.push_back(static_cast<char>(std::tolower(c)));
    } else if (c < 0x80 && std::isdigit(c)) {
      flush();
      out.units.emplace_back(kDigitWords[c - '0']);
    } else if (is_kept_punctuation(ch)) {
      flush();
      out.units.emplace_back(1, ch);
    } else {
      flush();
    }
  }
  flush();
  if (out.units.empty()) throw EmptySentence();
  return out;
}

bool is_punctuation_unit(std::string_view unit) {
  return unit.size() == 1 && is_kept_punctuation(unit.front());
}

bool Lexicon::add(std::string word, const std::vector<std::string>& phonemes) {
  if (phonemes.empty()) throw DataError("empty pronunciation for '" + word + "'");
  for (auto& c : word) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (entries_.contains(word)) return false;
  std::vector<PhonemeId> ids;
  ids.reserve(phonemes.size());
  for (const auto& p : phonemes) {
    const PhonemeId id = vocab_.id(p);
    if (special::is_special(id)) throw UnknownPhoneme(p);
    ids.push_back(id);
  }
  entries_.emplace(std::move(word), std::move(ids));
  return true;
}

const std::vector<PhonemeId>* Lexicon::find(std::string_view word) const {
  auto it = entries_.find(word);
  return it == entries_.end() ? nullptr : &it->second;
}

Lexicon load_lexicon(std::istream& in, const LexiconOptions& options) {
  return load_lexicon(in, PhonemeVocab::arpabet(options.strip_stress));
}

Lexicon load_lexicon(std::istream& in, const PhonemeVocab& vocab) {
  Lexicon lexicon(vocab);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view body = trim(line);
    if (body.empty() || body.starts_with(";;;")) continue;

    std::istringstream fields{std::string(body)};
    std::string word;
    fields >> word;
    std::vector<std::string> phonemes;
    for (std::string ph; fields >> ph;) {
      phonemes.push_back(vocab.strip_stress() ? strip_stress_digit(ph) : ph);
    }
    if (phonemes.empty()) throw ParseError(line_no, "entry '" + word + "' has no phonemes");

    if (const auto open = word.find('('); open != std::string::npos) {
      if (word.back() != ')' || open == 0) {
        throw ParseError(line_no, "malformed variant marker in '" + word + "'");
      }
      word.resize(open);
    }
    try {
      lexicon.add(word, phonemes);
    } catch (const UnknownPhoneme&) {
      throw;
    } catch (const DataError& e) {
      throw ParseError(line_no, e.what());
    }
  }
  return lexicon;
}

Lexicon load_lexicon_file(const std::string& path, const LexiconOptions& options) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open lexicon '" + path + "'");
  return load_lexicon(in, options);
}

std::vector<WordPronunciation> g2p(const NormalizedSentence& sentence, const Lexicon& lexicon) {
  std::vector<WordPronunciation> out;
  out.reserve(sentence.units.size());
  const PhonemeVocab& vocab = lexicon.vocab();
  for (const auto& unit : sentence.units) {
    WordPronunciation pron{unit, {}, false, false};
    if (is_punctuation_unit(unit)) {
      const auto id = vocab.punctuation(unit.front());
      pron.phonemes = {id ? *id : special::kUnk};
      pron.is_punct = id.has_value();
      pron.is_oov = !id.has_value();
    } else if (const auto* phonemes = lexicon.find(unit)) {
      pron.phonemes = *phonemes;
    } else {
      pron.phonemes = {special::kUnk};
      pron.is_oov = true;
    }
    out.push_back(std::move(pron));
  }
  return out;
}

std::vector<std::string> read_corpus(std::istream& in) {
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!trim(line).empty()) lines.push_back(std::move(line));
  }
  return lines;
}

std::vector<std::string> read_corpus_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus '" + path + "'");
  return read_corpus(in);
}

}  // namespace mpbert
