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

#include <benchmark/benchmark.h>

#include "fixtures.hpp"
#include "mpbert/bpe.hpp"
#include "mpbert/encoder.hpp"
#include "mpbert/masking.hpp"
#include "mpbert/training.hpp"

namespace mpbert {
namespace {

const testing::SyntheticSetup& setup() {
  static const testing::SyntheticSetup s = testing::make_synthetic_setup(400, 11, false);
  return s;
}

void BM_LearnBpe(benchmark::State& state) {
  const WordFreqs freqs = collect_word_freqs(setup().sentences, setup().lexicon);
  const std::size_t target = setup().table.base_size() + static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(learn_bpe(freqs, target));
}
BENCHMARK(BM_LearnBpe)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_EncodeWord(benchmark::State& state) {
  const auto& s = setup();
  const auto prons = g2p(normalize_text(s.sentences.front()), s.lexicon);
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& w = prons[i++ % prons.size()];
    benchmark::DoNotOptimize(encode_word(w.phonemes, s.lexicon.vocab(), s.table));
  }
}
BENCHMARK(BM_EncodeWord);

void BM_SelectMasks(benchmark::State& state) {
  const auto& s = setup();
  MaskPolicy policy;
  const VocabSizes sizes{s.config.phoneme_vocab, s.config.sup_vocab};
  for (auto _ : state) {
    ++policy.seed;
    benchmark::DoNotOptimize(select_masks(s.corpus.train[policy.seed % s.corpus.train.size()], policy, sizes));
  }
}
BENCHMARK(BM_SelectMasks);

void BM_ForwardBackward(benchmark::State& state) {
  const auto& s = setup();
  const EncoderParams params = init_params(s.config, 5);
  MaskPolicy policy;
  policy.seed = 5;
  const MaskedExample ex =
      select_masks(s.corpus.train.front(), policy, {s.config.phoneme_vocab, s.config.sup_vocab});
  EncoderParams grad = zero_params(s.config);
  for (auto _ : state) benchmark::DoNotOptimize(accumulate_gradients(ex, params, s.config, grad));
}
BENCHMARK(BM_ForwardBackward)->Unit(benchmark::kMicrosecond);

}  // namespace
}  // namespace mpbert

BENCHMARK_MAIN();
