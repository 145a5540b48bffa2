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

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "mpbert/errors.hpp"
#include "mpbert/mixing.hpp"
#include "mpbert/rng.hpp"

namespace mpbert {
namespace {

Matrix random_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
  return m;
}

MixedSequence hello_sequence() {
  const Lexicon lex = testing::hello_lexicon();
  return build_mixed_sequence(g2p(normalize_text("hello"), lex), lex.vocab(),
                              testing::hello_table(), 64);
}

TEST(BuildMixedSequence, HelloIsUpsampled) {
  const Lexicon lex = testing::hello_lexicon();
  const MergeTable t = testing::hello_table();
  const MixedSequence seq = hello_sequence();
  const auto& v = lex.vocab();
  EXPECT_EQ(seq.phoneme_ids, (std::vector<PhonemeId>{special::kBos, v.id("HH"), v.id("AH"),
                                                     v.id("L"), v.id("OW"), special::kEos}));
  const SupPhonemeId hhah = *t.find("hh-ah");
  const SupPhonemeId low = *t.find("l-ow");
  EXPECT_EQ(seq.sup_ids_upsampled,
            (std::vector<SupPhonemeId>{special::kBos, hhah, hhah, low, low, special::kEos}));
  EXPECT_EQ(seq.sup_spans, (std::vector<SupSpan>{{special::kBos, 0, 1}, {hhah, 1, 3},
                                                 {low, 3, 5}, {special::kEos, 5, 6}}));
  EXPECT_EQ(seq.word_spans, (std::vector<WordSpan>{{0, 1}, {1, 3}, {3, 4}}));
  EXPECT_EQ(validate_mixed_sequence(seq, v, t), "");
}

TEST(BuildMixedSequence, OovWordIsOneUnkSpan) {
  const Lexicon lex;
  const MergeTable t = MergeTable::for_vocab(lex.vocab());
  const MixedSequence seq = build_mixed_sequence(g2p(normalize_text("zyzzyx"), lex), lex.vocab(), t, 64);
  const std::vector<std::int32_t> expected = {special::kBos, special::kUnk, special::kEos};
  EXPECT_EQ(seq.phoneme_ids, expected);
  EXPECT_EQ(seq.sup_ids_upsampled, expected);
  EXPECT_EQ(validate_mixed_sequence(seq, lex.vocab(), t), "");
}

TEST(BuildMixedSequence, TwoWordsKeepWordBoundaries) {
  const PhonemeVocab v = testing::abc_vocab();
  MergeTable t = MergeTable::for_vocab(v);
  const SupPhonemeId ab = t.add_merge(*t.find("a"), *t.find("b"));
  const std::vector<WordPronunciation> prons = {{"ab", {v.id("A"), v.id("B")}, false, false},
                                                {"c", {v.id("C")}, false, false}};
  const MixedSequence seq = build_mixed_sequence(prons, v, t, 16);
  ASSERT_EQ(seq.sup_spans.size(), 4u);
  EXPECT_EQ(seq.sup_spans[1], (SupSpan{ab, 1, 3}));
  EXPECT_EQ(seq.sup_spans[2], (SupSpan{*t.find("c"), 3, 4}));
  EXPECT_EQ(seq.word_spans, (std::vector<WordSpan>{{0, 1}, {1, 2}, {2, 3}, {3, 4}}));
}

TEST(BuildMixedSequence, MaxLenIsEnforced) {
  const Lexicon lex = testing::hello_lexicon();
  const auto prons = g2p(normalize_text("hello"), lex);
  EXPECT_NO_THROW(build_mixed_sequence(prons, lex.vocab(), testing::hello_table(), 6));
  EXPECT_THROW(build_mixed_sequence(prons, lex.vocab(), testing::hello_table(), 5), SequenceTooLong);
  EXPECT_THROW(build_mixed_sequence({}, lex.vocab(), testing::hello_table(), 5), DataError);
}

TEST(BuildMixedSequence, InvariantsHoldOnSyntheticCorpus) {
  const auto setup = testing::make_synthetic_setup(200, 5, false);
  const Lexicon& lex = setup.lexicon;
  ASSERT_EQ(setup.corpus.train.size(), 200u);
  for (const auto& seq : setup.corpus.train) {
    ASSERT_EQ(seq.sup_ids_upsampled.size(), seq.phoneme_ids.size());
    ASSERT_EQ(validate_mixed_sequence(seq, lex.vocab(), setup.table), "");
    std::vector<PhonemeId> flat;
    for (const auto& span : seq.sup_spans) {
      if (special::is_special(span.sup_id)) {
        flat.push_back(span.sup_id);
        continue;
      }
      for (const auto& s : setup.table.decompose(span.sup_id)) flat.push_back(lex.vocab().id(s));
    }
    EXPECT_EQ(flat, seq.phoneme_ids);
  }
}

TEST(Embed, ZeroTablesGiveZeroRow) {
  const EmbeddingTables tables{Matrix::Zero(8, 4), Matrix::Zero(8, 4), Matrix::Zero(3, 4)};
  const Matrix out = embed(std::vector<PhonemeId>{5}, std::vector<SupPhonemeId>{6}, tables);
  EXPECT_EQ(out.rows(), 1);
  EXPECT_TRUE(out.isZero(0.0));
}

TEST(Embed, RowIsSumOfThreeLookups) {
  EmbeddingTables tables{Matrix::Zero(8, 3), Matrix::Zero(8, 3), Matrix::Zero(3, 3)};
  tables.phoneme(5, 0) = 1.0;
  tables.sup(6, 1) = 1.0;
  tables.position(0, 2) = 1.0;
  const Matrix out = embed(std::vector<PhonemeId>{5}, std::vector<SupPhonemeId>{6}, tables);
  EXPECT_EQ(out.row(0), (RowVector(3) << 1.0, 1.0, 1.0).finished());
}

TEST(Embed, SpanRowsShareTheSupTerm) {
  Rng rng(1);
  const Lexicon lex = testing::hello_lexicon();
  const MergeTable t = testing::hello_table();
  const MixedSequence seq = hello_sequence();
  EmbeddingTables tables{random_matrix(rng, static_cast<Eigen::Index>(lex.vocab().size()), 6),
                         random_matrix(rng, static_cast<Eigen::Index>(t.size()), 6),
                         random_matrix(rng, 8, 6)};
  const Matrix out = embed(seq, tables);
  for (std::size_t r : {1, 2}) {
    const RowVector sup_term = out.row(static_cast<Eigen::Index>(r)) -
                               tables.phoneme.row(seq.phoneme_ids[r]) -
                               tables.position.row(static_cast<Eigen::Index>(r));
    EXPECT_TRUE(sup_term.isApprox(tables.sup.row(*t.find("hh-ah")), 1e-12));
  }
}

TEST(Embed, LinearInEachTable) {
  Rng rng(2);
  const MixedSequence seq = hello_sequence();
  const EmbeddingTables tables{random_matrix(rng, 60, 5), random_matrix(rng, 60, 5),
                               random_matrix(rng, 8, 5)};
  const double alpha = 2.5;
  for (int which = 0; which < 3; ++which) {
    EmbeddingTables scaled = tables;
    EmbeddingTables only = {Matrix::Zero(60, 5), Matrix::Zero(60, 5), Matrix::Zero(8, 5)};
    Matrix* targets[] = {&scaled.phoneme, &scaled.sup, &scaled.position};
    const Matrix* sources[] = {&tables.phoneme, &tables.sup, &tables.position};
    Matrix* only_targets[] = {&only.phoneme, &only.sup, &only.position};
    *targets[which] *= alpha;
    *only_targets[which] = *sources[which];
    const Matrix delta = embed(seq, scaled) - embed(seq, tables);
    EXPECT_TRUE(delta.isApprox((alpha - 1.0) * embed(seq, only), 1e-12));
  }
}

TEST(Embed, OutOfRangeIdsThrow) {
  const EmbeddingTables tables{Matrix::Zero(8, 2), Matrix::Zero(8, 2), Matrix::Zero(2, 2)};
  EXPECT_THROW(embed(std::vector<PhonemeId>{8}, std::vector<SupPhonemeId>{0}, tables), IndexError);
  EXPECT_THROW(embed(std::vector<PhonemeId>{0}, std::vector<SupPhonemeId>{-1}, tables), IndexError);
  EXPECT_THROW(embed(std::vector<PhonemeId>{0, 0, 0}, std::vector<SupPhonemeId>{0, 0, 0}, tables),
               IndexError);
}

}  // namespace
}  // namespace mpbert
