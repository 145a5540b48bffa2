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

#include <cmath>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fixtures.hpp"
#include "mpbert/checkpoint.hpp"
#include "mpbert/errors.hpp"
#include "mpbert/rng.hpp"
#include "mpbert/training.hpp"

namespace mpbert {
namespace {

class TrainingTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    small_ = new testing::SyntheticSetup(testing::make_synthetic_setup(32, 21, false));
  }
  static void TearDownTestSuite() { delete small_; }
  static testing::SyntheticSetup* small_;
};

testing::SyntheticSetup* TrainingTest::small_ = nullptr;

std::string csv(const TrainResult& r) {
  std::ostringstream out;
  write_loss_csv(r.curve, out);
  return out.str();
}

TEST_F(TrainingTest, ZeroStepsReturnInitialization) {
  TrainConfig tc = TrainConfig::desk(0);
  tc.seed = 5;
  const TrainResult r = train(small_->corpus, small_->config, tc);
  EXPECT_TRUE(r.curve.empty());
  const EncoderParams init = init_params(small_->config, derive_seed(5, 0x1417));
  EXPECT_EQ(serialize_checkpoint(r.params, small_->config), serialize_checkpoint(init, small_->config));
}

TEST_F(TrainingTest, FixedSeedGivesIdenticalCurves) {
  TrainConfig tc = TrainConfig::desk(20);
  tc.batch_size = 4;
  tc.seed = 9;
  const TrainResult a = train(small_->corpus, small_->config, tc);
  const TrainResult b = train(small_->corpus, small_->config, tc);
  EXPECT_EQ(csv(a), csv(b));
  tc.seed = 10;
  EXPECT_NE(csv(train(small_->corpus, small_->config, tc)), csv(a));
}

TEST_F(TrainingTest, LossDecreases) {
  TrainConfig tc = TrainConfig::desk(200);
  tc.batch_size = 16;
  tc.peak_lr = 3e-3;
  const TrainResult r = train(small_->corpus, small_->config, tc);
  ASSERT_EQ(r.curve.size(), 200u);
  double head = 0.0, tail = 0.0;
  for (std::size_t i = 0; i < 20; ++i) {
    head += r.curve[i].loss_total;
    tail += r.curve[r.curve.size() - 1 - i].loss_total;
  }
  EXPECT_LT(tail, head);
}

TEST_F(TrainingTest, CallbackCanStopEarly) {
  TrainConfig tc = TrainConfig::desk(50);
  tc.batch_size = 2;
  const TrainResult r = train(small_->corpus, small_->config, tc,
                              [](const LossRecord& rec, const EncoderParams&) { return rec.step < 3; });
  EXPECT_EQ(r.curve.size(), 3u);
}

TEST_F(TrainingTest, DivergenceReportsStep) {
  EncoderParams p = init_params(small_->config, 1);
  p.phoneme_head_b(0, 7) = std::numeric_limits<double>::quiet_NaN();
  TrainConfig tc = TrainConfig::desk(5);
  tc.batch_size = 2;
  try {
    train_from(small_->corpus, small_->config, p, tc);
    FAIL() << "expected NumericalError";
  } catch (const NumericalError& e) {
    EXPECT_EQ(e.where(), 1);
  }
}

TEST_F(TrainingTest, EvalDenominatorsMatchMaskFlags) {
  const EncoderParams p = init_params(small_->config, 2);
  MaskPolicy policy;
  policy.seed = 4;
  const MlmReport r = eval_mlm(p, small_->config, small_->corpus.train, policy);
  std::size_t positions = 0, sups = 0;
  for (std::size_t i = 0; i < small_->corpus.train.size(); ++i) {
    MaskPolicy pi = policy;
    pi.seed = derive_seed(policy.seed, i);
    const MaskedExample ex = select_masks(small_->corpus.train[i], pi,
                                          {small_->config.phoneme_vocab, small_->config.sup_vocab});
    positions += ex.masked_positions();
    sups += ex.masked_sup_tokens();
  }
  EXPECT_EQ(r.phoneme_targets, positions);
  EXPECT_EQ(r.sup_targets, sups);
  EXPECT_EQ(r.examples, small_->corpus.train.size());
  EXPECT_GE(r.acc_phoneme, 0.0);
  EXPECT_LE(r.acc_phoneme, 1.0);
}

// Class labels are exchangeable under random initialization, so a fresh
// model per sentence predicts independently of the target: accuracy ~ 1/V.
TEST(Training, UntrainedModelIsAtChance) {
  const auto setup = testing::make_synthetic_setup(3000, 31, false);
  MaskPolicy policy;
  policy.whole_word = false;
  policy.p_mask = 1.0;
  policy.p_random = policy.p_keep = 0.0;
  std::size_t correct = 0, total = 0;
  for (std::size_t i = 0; i < setup.corpus.train.size(); ++i) {
    policy.seed = i;
    const MlmReport r = eval_mlm(init_params(setup.config, 1000 + i), setup.config,
                                 {setup.corpus.train[i]}, policy);
    correct += r.phoneme_correct;
    total += r.phoneme_targets;
  }
  const double v = static_cast<double>(setup.config.phoneme_vocab);
  const double acc = static_cast<double>(correct) / static_cast<double>(total);
  const double sigma = std::sqrt((1.0 / v) * (1.0 - 1.0 / v) / static_cast<double>(total));
  EXPECT_GT(total, 5000u);
  EXPECT_NEAR(acc, 1.0 / v, 3.0 * sigma) << correct << " of " << total;
}

TEST(LearningRate, WarmupThenLinearDecay) {
  TrainConfig tc = TrainConfig::desk(100);
  tc.peak_lr = 1.0;
  EXPECT_EQ(tc.warmup_steps, 10u);
  EXPECT_DOUBLE_EQ(learning_rate(tc, 1), 0.1);
  EXPECT_DOUBLE_EQ(learning_rate(tc, 10), 1.0);
  EXPECT_LT(learning_rate(tc, 11), 1.0);
  EXPECT_GT(learning_rate(tc, 100), 0.0);
  for (std::size_t s = 11; s < 100; ++s) EXPECT_GT(learning_rate(tc, s), learning_rate(tc, s + 1));
  tc.warmup_steps = 200;
  EXPECT_THROW(tc.validate(), ConfigError);
}

TEST(PrepareCorpus, SplitIsDeterministicBySentenceHash) {
  const auto setup = testing::make_synthetic_setup(2000, 41, true);
  const Corpus& c = setup.corpus;
  EXPECT_EQ(c.train.size() + c.heldout.size(), 2000u);
  std::size_t expected_heldout = 0;
  for (const auto& s : setup.sentences) expected_heldout += fnv1a(s) % 100 < kHeldoutPercent;
  EXPECT_EQ(c.heldout.size(), expected_heldout);
  EXPECT_GT(c.heldout.size(), 50u);
  EXPECT_LT(c.heldout.size(), 150u);
}

TEST(PrepareCorpus, TruncatesAtWordBoundaries) {
  const Lexicon lex = testing::hello_lexicon();
  const auto prons = g2p(normalize_text("hello world hello world"), lex);
  const auto cut = truncate_to_fit(prons, 11);
  ASSERT_EQ(cut.size(), 2u);
  const Corpus c = prepare_corpus({"hello world hello world", "", "###"}, lex, testing::hello_table(), 11, false);
  ASSERT_EQ(c.train.size(), 1u);
  EXPECT_EQ(c.train[0].length(), 10u);
  EXPECT_EQ(c.skipped, 2u);
}

TEST(PrepareCorpus, FnvIsStable) {
  EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cULL);
}

TEST(ReportJson, FieldsAndNullAccuracy) {
  MlmReport r;
  const auto j = nlohmann::json::parse(report_to_json(r, MaskPolicy{}, ModelConfig::tiny()));
  EXPECT_TRUE(j["acc_phoneme"].is_null());
  EXPECT_EQ(j["mask_mode"], "mixed");
  EXPECT_EQ(j["config_fingerprint"].get<std::string>().size(), 16u);
  r.phoneme_targets = 4;
  r.phoneme_correct = 1;
  r.acc_phoneme = 0.25;
  const auto k = nlohmann::json::parse(report_to_json(r, MaskPolicy{}, ModelConfig::tiny()));
  EXPECT_EQ(k["acc_phoneme"], 0.25);
}

TEST(ExportEmbeddings, HelloCarriesSpans) {
  const Lexicon lex = testing::hello_lexicon();
  const MergeTable table = testing::hello_table();
  const ModelConfig c = ModelConfig::tiny().with_vocab(lex.vocab().size(), table.size());
  const EncoderParams p = init_params(c, 3);
  const EmbeddingExport a = export_embeddings(p, c, "hello", lex, table);
  EXPECT_EQ(a.hidden.rows(), 6);
  EXPECT_EQ(a.hidden.cols(), 32);
  EXPECT_EQ(a.hidden, export_embeddings(p, c, "hello", lex, table).hidden);
  const auto j = nlohmann::json::parse(export_to_json(a, table));
  EXPECT_EQ(j["spans"][1]["token"], "hh-ah");
  EXPECT_EQ(j["spans"][1]["start"], 1);
  EXPECT_EQ(j["spans"][1]["end"], 3);
  EXPECT_EQ(j["spans"][2]["token"], "l-ow");
  EXPECT_EQ(j["spans"][2]["start"], 3);
  EXPECT_EQ(j["spans"][2]["end"], 5);
  const EmbeddingExport two = export_embeddings(p, c, "hello world", lex, table);
  EXPECT_EQ(two.hidden.rows(), 4 + 4 + 2);
  EXPECT_THROW(export_embeddings(p, c, "###", lex, table), EmptySentence);
}

}  // namespace
}  // namespace mpbert
