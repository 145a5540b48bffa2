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

#include "mpbert/training.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include <json.hpp>

#include "mpbert/errors.hpp"
#include "mpbert/rng.hpp"

namespace mpbert {
namespace {

constexpr std::uint64_t kDropoutStream = 0xd50b;
constexpr std::uint64_t kShuffleStream = 0x5e1f;
constexpr std::uint64_t kInitStream = 0x1417;
constexpr std::uint64_t kMaskStream = 0x3a5c;

bool decays(const std::string& name) {
  return !(name.starts_with("embeddings.") || name.ends_with(".gain") || name.ends_with(".bias") ||
           name.ends_with(".bq") || name.ends_with(".bk") || name.ends_with(".bv") ||
           name.ends_with(".bo"));
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::vector<WordPronunciation> truncate_to_fit(std::vector<WordPronunciation> prons,
                                               std::size_t max_len) {
  std::size_t total = 2;
  std::size_t keep = 0;
  for (; keep < prons.size(); ++keep) {
    if (total + prons[keep].phonemes.size() > max_len) break;
    total += prons[keep].phonemes.size();
  }
  prons.resize(std::max<std::size_t>(keep, 1));
  return prons;
}

Corpus prepare_corpus(const std::vector<std::string>& sentences, const Lexicon& lexicon,
                      const MergeTable& table, std::size_t max_len, bool split) {
  Corpus corpus;
  for (const auto& sentence : sentences) {
    NormalizedSentence normalized;
    try {
      normalized = normalize_text(sentence);
    } catch (const EmptySentence&) {
      ++corpus.skipped;
      continue;
    }
    auto prons = truncate_to_fit(g2p(normalized, lexicon), max_len);
    MixedSequence seq = build_mixed_sequence(prons, lexicon.vocab(), table, max_len);
    const bool heldout = split && fnv1a(sentence) % 100 < kHeldoutPercent;
    (heldout ? corpus.heldout : corpus.train).push_back(std::move(seq));
  }
  return corpus;
}

WordFreqs collect_word_freqs(const std::vector<std::string>& sentences, const Lexicon& lexicon) {
  WordFreqs freqs;
  for (const auto& sentence : sentences) {
    NormalizedSentence normalized;
    try {
      normalized = normalize_text(sentence);
    } catch (const EmptySentence&) {
      continue;
    }
    for (const auto& word : g2p(normalized, lexicon)) {
      if (word.is_oov) continue;
      std::vector<std::string> symbols;
      for (auto id : word.phonemes) symbols.push_back(lexicon.vocab().symbol(id));
      ++freqs[symbols];
    }
  }
  return freqs;
}

TrainConfig TrainConfig::desk(std::size_t steps) {
  TrainConfig c;
  c.steps = steps;
  c.warmup_steps = steps / 10;
  return c;
}

void TrainConfig::validate() const {
  if (batch_size == 0) throw ConfigError("batch_size must be at least 1");
  if (warmup_steps > steps) throw ConfigError("warmup_steps must not exceed steps");
  if (!(peak_lr > 0.0)) throw ConfigError("peak_lr must be positive");
  policy.validate();
}

double learning_rate(const TrainConfig& c, std::size_t step) {
  if (step <= c.warmup_steps) {
    return c.warmup_steps ? c.peak_lr * static_cast<double>(step) / static_cast<double>(c.warmup_steps)
                          : c.peak_lr;
  }
  const double remaining = static_cast<double>(c.steps - step + 1);
  return c.peak_lr * remaining / static_cast<double>(c.steps - c.warmup_steps + 1);
}

TrainResult train(const Corpus& corpus, const ModelConfig& model_config,
                  const TrainConfig& train_config, const StepCallback& on_step) {
  return train_from(corpus, model_config,
                    init_params(model_config, derive_seed(train_config.seed, kInitStream)),
                    train_config, on_step);
}

TrainResult train_from(const Corpus& corpus, const ModelConfig& model_config,
                       EncoderParams params, const TrainConfig& tc, const StepCallback& on_step) {
  model_config.validate();
  tc.validate();
  check_shapes(params, model_config);
  if (corpus.train.empty()) throw EmptyInput("training corpus is empty");

  TrainResult result;
  result.config = model_config;
  const VocabSizes vocab{model_config.phoneme_vocab, model_config.sup_vocab};

  EncoderParams m = zero_params(model_config);
  EncoderParams v = zero_params(model_config);
  EncoderParams grad = zero_params(model_config);

  // Epoch-wise shuffled order over the training split.
  std::vector<std::size_t> order(corpus.train.size());
  std::size_t cursor = order.size();
  std::uint64_t epoch = 0;
  auto next_index = [&]() {
    if (cursor == order.size()) {
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      Rng rng(derive_seed(tc.seed, kShuffleStream, epoch++));
      for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
      cursor = 0;
    }
    return order[cursor++];
  };

  for (std::size_t step = 1; step <= tc.steps; ++step) {
    grad.visit([](const std::string&, Matrix& g) { g.setZero(); });
    LossRecord rec{step, 0.0, 0.0, 0.0, learning_rate(tc, step)};
    const double scale = 1.0 / static_cast<double>(tc.batch_size);
    try {
      for (std::size_t b = 0; b < tc.batch_size; ++b) {
        MaskPolicy policy = tc.policy;
        policy.seed = derive_seed(tc.seed ^ kMaskStream, step, b);
        const MaskedExample ex = select_masks(corpus.train[next_index()], policy, vocab);
        const MlmOutput out = accumulate_gradients(ex, params, model_config, grad, scale, true,
                                                   derive_seed(tc.seed ^ kDropoutStream, step, b));
        rec.loss_total += out.loss_total * scale;
        rec.loss_phoneme += out.loss_phoneme * scale;
        rec.loss_sup += out.loss_sup * scale;
      }
    } catch (const NumericalError& e) {
      throw NumericalError("training diverged at step " + std::to_string(step) + ": " + e.what(),
                           static_cast<long>(step));
    }
    if (!std::isfinite(rec.loss_total)) {
      throw NumericalError("training diverged at step " + std::to_string(step), static_cast<long>(step));
    }

    const double bc1 = 1.0 - std::pow(tc.beta1, static_cast<double>(step));
    const double bc2 = 1.0 - std::pow(tc.beta2, static_cast<double>(step));
    std::vector<Matrix*> ms, vs, gs;
    m.visit([&](const std::string&, Matrix& x) { ms.push_back(&x); });
    v.visit([&](const std::string&, Matrix& x) { vs.push_back(&x); });
    grad.visit([&](const std::string&, Matrix& x) { gs.push_back(&x); });
    std::size_t i = 0;
    params.visit([&](const std::string& name, Matrix& p) {
      Matrix& mi = *ms[i];
      Matrix& vi = *vs[i];
      const Matrix& gi = *gs[i];
      ++i;
      mi = tc.beta1 * mi + (1.0 - tc.beta1) * gi;
      vi = tc.beta2 * vi + (1.0 - tc.beta2) * gi.cwiseProduct(gi);
      if (tc.weight_decay > 0.0 && decays(name)) p *= 1.0 - rec.lr * tc.weight_decay;
      p.array() -= rec.lr * (mi.array() / bc1) / ((vi.array() / bc2).sqrt() + tc.epsilon);
    });

    result.curve.push_back(rec);
    if (tc.eval_every && (step % tc.eval_every == 0 || step == tc.steps) && !corpus.heldout.empty()) {
      result.evaluations.emplace_back(step, eval_mlm(params, model_config, corpus.heldout, tc.policy));
    }
    if (on_step && !on_step(rec, params)) break;
  }
  result.params = std::move(params);
  return result;
}

MlmReport eval_mlm(const EncoderParams& params, const ModelConfig& config,
                   const std::vector<MixedSequence>& sequences, const MaskPolicy& policy) {
  MlmReport report;
  const VocabSizes vocab{config.phoneme_vocab, config.sup_vocab};
  for (std::size_t i = 0; i < sequences.size(); ++i) {
    MaskPolicy p = policy;
    p.seed = derive_seed(policy.seed, i);
    const MaskedExample ex = select_masks(sequences[i], p, vocab);
    const Matrix hidden = encoder_forward(ex, params, config, false);
    const MlmOutput out = mlm_heads(hidden, ex, params);
    report.phoneme_targets += out.phoneme_targets.size();
    report.sup_targets += out.sup_targets.size();
    report.phoneme_correct += out.phoneme_correct;
    report.sup_correct += out.sup_correct;
    report.loss_phoneme += out.loss_phoneme;
    report.loss_sup += out.loss_sup;
    report.loss_total += out.loss_total;
    ++report.examples;
  }
  if (report.examples) {
    const auto n = static_cast<double>(report.examples);
    report.loss_phoneme /= n;
    report.loss_sup /= n;
    report.loss_total /= n;
  }
  if (report.phoneme_targets) {
    report.acc_phoneme = static_cast<double>(report.phoneme_correct) / static_cast<double>(report.phoneme_targets);
  }
  if (report.sup_targets) {
    report.acc_sup = static_cast<double>(report.sup_correct) / static_cast<double>(report.sup_targets);
  }
  return report;
}

void write_loss_csv(const std::vector<LossRecord>& curve, std::ostream& out) {
  out << "step,loss_total,loss_phoneme,loss_sup,lr\n";
  for (const auto& r : curve) {
    out << r.step << ',' << format_double(r.loss_total) << ',' << format_double(r.loss_phoneme) << ','
        << format_double(r.loss_sup) << ',' << format_double(r.lr) << '\n';
  }
}

std::string report_to_json(const MlmReport& report, const MaskPolicy& policy,
                           const ModelConfig& config) {
  nlohmann::ordered_json j;
  j["acc_phoneme"] = report.phoneme_targets ? nlohmann::ordered_json(report.acc_phoneme) : nullptr;
  j["acc_sup"] = report.sup_targets ? nlohmann::ordered_json(report.acc_sup) : nullptr;
  j["loss_total"] = report.loss_total;
  j["loss_phoneme"] = report.loss_phoneme;
  j["loss_sup"] = report.loss_sup;
  j["phoneme_targets"] = report.phoneme_targets;
  j["sup_targets"] = report.sup_targets;
  j["phoneme_correct"] = report.phoneme_correct;
  j["sup_correct"] = report.sup_correct;
  j["examples"] = report.examples;
  j["mask_mode"] = std::string(to_string(policy.mode));
  j["mask_ratio"] = policy.ratio;
  j["whole_word"] = policy.whole_word;
  j["seed"] = policy.seed;
  char fp[17];
  std::snprintf(fp, sizeof fp, "%016llx",
                static_cast<unsigned long long>(fnv1a(config.to_document())));
  j["config_fingerprint"] = fp;
  return j.dump(2) + "\n";
}

EmbeddingExport export_embeddings(const EncoderParams& params, const ModelConfig& config,
                                  std::string_view text, const Lexicon& lexicon,
                                  const MergeTable& table) {
  EmbeddingExport ex;
  const auto prons = g2p(normalize_text(text), lexicon);
  ex.sequence = build_mixed_sequence(prons, lexicon.vocab(), table, config.max_len);
  for (auto id : ex.sequence.phoneme_ids) ex.phonemes.push_back(lexicon.vocab().symbol(id));
  ex.hidden = encoder_forward(ex.sequence, params, config);
  return ex;
}

std::string export_to_json(const EmbeddingExport& ex, const MergeTable& table) {
  nlohmann::ordered_json j;
  j["rows"] = ex.hidden.rows();
  j["cols"] = ex.hidden.cols();
  j["phonemes"] = ex.phonemes;
  auto spans = nlohmann::ordered_json::array();
  for (const auto& s : ex.sequence.sup_spans) {
    spans.push_back({{"token", table.surface(s.sup_id)}, {"start", s.start}, {"end", s.end}});
  }
  j["spans"] = spans;
  auto words = nlohmann::ordered_json::array();
  for (const auto& w : ex.sequence.word_spans) words.push_back({w.first_sup, w.last_sup});
  j["word_spans"] = words;
  auto hidden = nlohmann::ordered_json::array();
  for (Eigen::Index r = 0; r < ex.hidden.rows(); ++r) {
    std::vector<double> row(ex.hidden.row(r).data(), ex.hidden.row(r).data() + ex.hidden.cols());
    hidden.push_back(row);
  }
  j["hidden"] = hidden;
  return j.dump() + "\n";
}

}  // namespace mpbert
