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

#include "synthetic.hpp"

#include <array>
#include <cctype>
#include <set>
#include <sstream>
#include <string_view>

#include "mpbert/rng.hpp"

namespace mpbert::testing {
namespace {

struct Phone {
  std::string_view arpabet;
  std::string_view spelling;
};

constexpr std::array<Phone, 16> kOnsets = {{{"B", "b"}, {"D", "d"}, {"F", "f"}, {"G", "g"},
                                            {"HH", "h"}, {"K", "k"}, {"L", "l"}, {"M", "m"},
                                            {"N", "n"}, {"P", "p"}, {"R", "r"}, {"S", "s"},
                                            {"T", "t"}, {"V", "v"}, {"W", "w"}, {"Z", "z"}}};
constexpr std::array<Phone, 10> kNuclei = {{{"AA", "a"}, {"AE", "ae"}, {"AH", "u"}, {"EH", "e"},
                                            {"IY", "ee"}, {"IH", "i"}, {"OW", "o"}, {"UW", "oo"},
                                            {"EY", "ay"}, {"AY", "ai"}}};
constexpr std::array<Phone, 5> kCodas = {{{"N", "n"}, {"S", "ss"}, {"T", "tt"}, {"K", "ck"}, {"L", "ll"}}};

struct Syllable {
  std::vector<std::string> phones;
  std::string spelling;
};

}  // namespace

SyntheticLanguage make_synthetic_language(const SyntheticLanguageOptions& options) {
  Rng rng(options.seed);
  SyntheticLanguage lang;
  lang.seed = options.seed;
  lang.options = options;

  std::vector<Syllable> syllables;
  std::set<std::string> seen_syllables;
  while (syllables.size() < options.syllables) {
    const auto& on = kOnsets[rng.below(kOnsets.size())];
    const auto& nu = kNuclei[rng.below(kNuclei.size())];
    Syllable s{{std::string(on.arpabet), std::string(nu.arpabet)},
               std::string(on.spelling) + std::string(nu.spelling)};
    if (rng.bernoulli(0.3)) {
      const auto& co = kCodas[rng.below(kCodas.size())];
      s.phones.emplace_back(co.arpabet);
      s.spelling += co.spelling;
    }
    if (seen_syllables.insert(s.spelling).second) syllables.push_back(std::move(s));
  }

  std::set<std::string> seen_words;
  while (lang.words.size() < options.words) {
    const std::size_t n = options.min_syllables +
                          rng.below(options.max_syllables - options.min_syllables + 1);
    std::string spelling;
    std::vector<std::string> phones;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& s = syllables[rng.below(syllables.size())];
      spelling += s.spelling;
      phones.insert(phones.end(), s.phones.begin(), s.phones.end());
    }
    if (!seen_words.insert(spelling).second) continue;
    lang.words.push_back(std::move(spelling));
    lang.prons.push_back(std::move(phones));
  }

  lang.next.resize(lang.words.size());
  for (auto& succ : lang.next) {
    for (std::size_t k = 0; k < options.successors; ++k) succ.push_back(rng.below(lang.words.size()));
  }
  return lang;
}

std::string SyntheticLanguage::lexicon_text() const {
  std::ostringstream out;
  out << ";;; synthetic lexicon\n";
  for (std::size_t i = 0; i < words.size(); ++i) {
    std::string upper = words[i];
    for (auto& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    out << upper << ' ';
    for (const auto& p : prons[i]) {
      const bool vowel = p.size() == 2 && std::string_view("AEIOU").find(p[0]) != std::string_view::npos;
      out << ' ' << p << (vowel ? "1" : "");
    }
    out << '\n';
    if (i == 0) out << upper << "(2)  " << "Z IY1\n";
  }
  return out.str();
}

std::vector<std::string> SyntheticLanguage::sentences(std::size_t n, std::uint64_t corpus_seed) const {
  std::vector<std::string> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng(derive_seed(corpus_seed, i));
    const std::size_t len = options.min_sentence_words +
                            rng.below(options.max_sentence_words - options.min_sentence_words + 1);
    std::size_t w = rng.below(words.size());
    std::string sentence;
    for (std::size_t k = 0; k < len; ++k) {
      if (k) sentence += ' ';
      sentence += words[w];
      // Skewed successor choice: 60% / 30% / 10%.
      const double u = rng.uniform();
      const std::size_t pick = u < 0.6 ? 0 : (u < 0.9 ? 1 : 2);
      w = next[w][std::min(pick, next[w].size() - 1)];
    }
    sentence += '.';
    out.push_back(std::move(sentence));
  }
  return out;
}

}  // namespace mpbert::testing
