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

#include "mpbert/phoneme_vocab.hpp"

#include <cctype>

#include "mpbert/errors.hpp"

namespace mpbert {
namespace {

constexpr std::array<std::string_view, 15> kVowels = {"AA", "AE", "AH", "AO", "AW",
                                                      "AY", "EH", "ER", "EY", "IH",
                                                      "IY", "OW", "OY", "UH", "UW"};

constexpr std::array<std::string_view, 24> kConsonants = {
    "B", "CH", "D", "DH", "F", "G", "HH", "JH", "K", "L", "M", "N",
    "NG", "P", "R", "S", "SH", "T", "TH", "V", "W", "Y", "Z", "ZH"};

}  // namespace

PhonemeVocab::PhonemeVocab(std::vector<std::string> base_symbols, bool strip_stress)
    : strip_stress_(strip_stress) {
  symbols_.reserve(special::kCount + base_symbols.size());
  for (auto s : special::kSymbols) symbols_.emplace_back(s);
  for (auto& s : base_symbols) symbols_.push_back(std::move(s));
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    if (symbols_[i].empty()) throw ConfigError("empty phoneme symbol");
    if (!index_.emplace(symbols_[i], static_cast<PhonemeId>(i)).second) {
      throw ConfigError("duplicate phoneme symbol '" + symbols_[i] + "'");
    }
  }
}

PhonemeVocab PhonemeVocab::arpabet(bool strip_stress) {
  std::vector<std::string> base;
  for (const auto& p : kPunctuation) base.emplace_back(p.phoneme);
  for (auto v : kVowels) {
    if (strip_stress) {
      base.emplace_back(v);
    } else {
      for (char stress : {'0', '1', '2'}) base.push_back(std::string(v) + stress);
    }
  }
  for (auto c : kConsonants) base.emplace_back(c);
  return PhonemeVocab(std::move(base), strip_stress);
}

const std::string& PhonemeVocab::symbol(PhonemeId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= symbols_.size()) {
    throw IndexError("phoneme id " + std::to_string(id) + " out of range");
  }
  return symbols_[static_cast<std::size_t>(id)];
}

std::optional<PhonemeId> PhonemeVocab::find(std::string_view symbol) const {
  auto it = index_.find(std::string(symbol));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

PhonemeId PhonemeVocab::id(std::string_view symbol) const {
  if (auto found = find(symbol)) return *found;
  throw UnknownPhoneme(std::string(symbol));
}

std::vector<std::string> PhonemeVocab::base_symbols() const {
  return {symbols_.begin() + special::kCount, symbols_.end()};
}

std::optional<PhonemeId> PhonemeVocab::punctuation(char mark) const {
  for (const auto& p : kPunctuation) {
    if (p.mark == mark) return find(p.phoneme);
  }
  return std::nullopt;
}

std::string strip_stress_digit(std::string_view symbol) {
  if (symbol.size() > 1 && std::isdigit(static_cast<unsigned char>(symbol.back()))) {
    symbol.remove_suffix(1);
  }
  return std::string(symbol);
}

}  // namespace mpbert
