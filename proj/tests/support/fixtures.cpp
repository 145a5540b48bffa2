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

#include "fixtures.hpp"

#include <sstream>

#include "mpbert/rng.hpp"

namespace mpbert::testing {

std::string hello_lexicon_text() {
  return ";;; toy lexicon\n"
         "HELLO  HH AH0 L OW1\n"
         "WORLD  W ER1 L D\n";
}

Lexicon hello_lexicon() {
  std::istringstream in(hello_lexicon_text());
  return load_lexicon(in);
}

MergeTable hello_table() {
  MergeTable table = MergeTable::for_vocab(PhonemeVocab::arpabet());
  table.add_merge(*table.base_token("HH"), *table.base_token("AH"));
  table.add_merge(*table.base_token("L"), *table.base_token("OW"));
  return table;
}

PhonemeVocab abc_vocab() { return PhonemeVocab({"A", "B", "C"}); }

std::vector<std::string> random_alphabet() { return {"A", "B", "C", "D", "E"}; }

WordFreqs random_word_freqs(std::uint64_t seed, std::size_t max_words) {
  Rng rng(seed);
  const auto alphabet = random_alphabet();
  WordFreqs freqs;
  const std::size_t words = 1 + rng.below(max_words);
  for (std::size_t w = 0; w < words; ++w) {
    std::vector<std::string> word;
    const std::size_t len = 1 + rng.below(6);
    for (std::size_t i = 0; i < len; ++i) word.push_back(alphabet[rng.below(alphabet.size())]);
    freqs[word] += 1 + rng.below(5);
  }
  return freqs;
}

std::vector<std::pair<std::string, std::string>> merge_surfaces(const MergeTable& table) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [l, r] : table.merges()) out.emplace_back(table.surface(l), table.surface(r));
  return out;
}

EncoderParams random_params(const ModelConfig& config, std::uint64_t seed, double scale) {
  EncoderParams params = zero_params(config);
  Rng rng(seed);
  params.visit([&](const std::string& name, Matrix& m) {
    const bool gain = name.ends_with(".gain");
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      m.data()[i] = (gain ? 1.0 : 0.0) + scale * rng.normal();
    }
  });
  return params;
}

SyntheticSetup make_synthetic_setup(std::size_t sentences, std::uint64_t corpus_seed, bool split,
                                    std::size_t merges) {
  SyntheticSetup s;
  s.language = make_synthetic_language();
  std::istringstream in(s.language.lexicon_text());
  s.lexicon = load_lexicon(in);
  s.sentences = s.language.sentences(sentences, corpus_seed);
  const MergeTable base = MergeTable::for_vocab(s.lexicon.vocab());
  s.table = learn_bpe(collect_word_freqs(s.sentences, s.lexicon), base.base_size() + merges,
                      base.base_symbols());
  s.config = ModelConfig::tiny().with_vocab(s.lexicon.vocab().size(), s.table.size());
  s.corpus = prepare_corpus(s.sentences, s.lexicon, s.table, s.config.max_len, split);
  return s;
}

}  // namespace mpbert::testing
