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

// Small shared worlds for the unit and acceptance tests.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mpbert/bpe.hpp"
#include "mpbert/encoder.hpp"
#include "mpbert/frontend.hpp"
#include "mpbert/model_config.hpp"
#include "mpbert/training.hpp"
#include "synthetic.hpp"

namespace mpbert::testing {

/// Lexicon text with "hello" and "world" in CMU format.
std::string hello_lexicon_text();
Lexicon hello_lexicon();

/// Table over the ARPAbet base with merges (HH, AH) then (L, OW).
MergeTable hello_table();

/// Three-symbol vocabulary {A, B, C} used by the hand-worked BPE examples.
PhonemeVocab abc_vocab();

/// Random small corpus over the symbols "A".."E" (up to max_words distinct
/// words of 1 to 6 symbols, frequencies 1 to 5), for BPE property checks.
WordFreqs random_word_freqs(std::uint64_t seed, std::size_t max_words = 50);
std::vector<std::string> random_alphabet();

/// Merges of a table as surface pairs.
std::vector<std::pair<std::string, std::string>> merge_surfaces(const MergeTable& table);

/// Every tensor (gains, biases and embeddings included) filled with
/// N(0, scale^2); layer-norm gains get 1 + N(0, scale^2).
EncoderParams random_params(const ModelConfig& config, std::uint64_t seed, double scale);

struct SyntheticSetup {
  SyntheticLanguage language;
  Lexicon lexicon;
  std::vector<std::string> sentences;
  MergeTable table;
  Corpus corpus;
  ModelConfig config;  // tiny, with vocabulary sizes filled in
};

/// Synthetic lexicon, n sentences, a BPE table of base + merges learned on
/// them, and the prepared corpus.
SyntheticSetup make_synthetic_setup(std::size_t sentences, std::uint64_t corpus_seed, bool split,
                                    std::size_t merges = kTinyMerges);

}  // namespace mpbert::testing
