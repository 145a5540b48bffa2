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

#include "cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <nlohmann/json.hpp>
#include <sstream>

#include "mpbert/bpe.hpp"
#include "mpbert/checkpoint.hpp"
#include "mpbert/errors.hpp"
#include "mpbert/frontend.hpp"
#include "mpbert/masking.hpp"
#include "mpbert/mixing.hpp"
#include "mpbert/training.hpp"

namespace mpbert::cli {
namespace {

struct Options {
  std::string lexicon;
  std::string corpus;
  std::string merges;
  std::string ckpt;
  std::string out;
  std::string text;
  std::string vocab_size = "tiny";
  std::string preset = "tiny";
  std::string mask_mode = "mixed";
  double mask_ratio = 0.15;
  bool wwm = true;
  bool keep_stress = false;
  std::size_t steps = 1000;
  std::size_t batch_size = 32;
  double lr = 5e-4;
  std::size_t eval_every = 0;
  std::uint64_t seed = 0;
};

class UsageError : public Error {
 public:
  using Error::Error;
};

MaskPolicy policy_from(const Options& o) {
  MaskPolicy p;
  p.ratio = o.mask_ratio;
  p.whole_word = o.wwm;
  p.mode = parse_mask_mode(o.mask_mode);
  p.seed = o.seed;
  p.validate();
  return p;
}

// Lexicon whose phoneme inventory matches the merges file.
Lexicon lexicon_for(const Options& o, const MergeTable& table) {
  Lexicon lex = load_lexicon_file(o.lexicon, {.strip_stress = table.strip_stress()});
  if (lex.vocab().base_symbols() != table.base_symbols()) {
    throw DataError("merges file '" + o.merges + "' does not match the lexicon's phoneme inventory");
  }
  return lex;
}

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream f(path, std::ios::binary);
  if (!f || !f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()))) {
    throw DataError("cannot write '" + path + "'");
  }
}

void emit(const Options& o, const std::string& bytes, std::ostream& out) {
  if (o.out.empty()) {
    out << bytes;
  } else {
    write_file(o.out, bytes);
  }
}

void learn_bpe_cmd(const Options& o, std::ostream& out) {
  const Lexicon lex = load_lexicon_file(o.lexicon, {.strip_stress = !o.keep_stress});
  const auto sentences = read_corpus_file(o.corpus);
  const MergeTable base = MergeTable::for_vocab(lex.vocab());
  const std::size_t target = resolve_vocab_size(o.vocab_size, base.base_size());
  const MergeTable table =
      learn_bpe(collect_word_freqs(sentences, lex), target, base.base_symbols(), lex.vocab().strip_stress());
  save_merges_file(table, o.out);
  out << "learned " << table.merges().size() << " merges (target size " << target << ") -> " << o.out
      << '\n';
}

void encode_cmd(const Options& o, std::ostream& out) {
  if (o.text.empty() == o.corpus.empty()) throw UsageError("encode needs exactly one of --text or --corpus");
  const MergeTable table = load_merges_file(o.merges);
  const Lexicon lex = lexicon_for(o, table);
  const std::vector<std::string> sentences = o.text.empty() ? read_corpus_file(o.corpus)
                                                            : std::vector<std::string>{o.text};
  for (std::size_t s = 0; s < sentences.size(); ++s) {
    std::size_t position = 1;  // after BOS
    for (const auto& word : g2p(normalize_text(sentences[s]), lex)) {
      nlohmann::ordered_json j;
      j["sentence"] = s;
      j["word"] = word.surface;
      auto tokens = nlohmann::ordered_json::array();
      auto spans = nlohmann::ordered_json::array();
      for (const auto& t : encode_word(word.phonemes, lex.vocab(), table)) {
        tokens.push_back(table.surface(t.id));
        spans.push_back({position, position + t.span_len});
        position += t.span_len;
      }
      j["tokens"] = tokens;
      j["spans"] = spans;
      j["oov"] = word.is_oov;
      j["punct"] = word.is_punct;
      out << j.dump() << '\n';
    }
  }
}

void pretrain_cmd(const Options& o, std::ostream& out) {
  const MergeTable table = load_merges_file(o.merges);
  const Lexicon lex = lexicon_for(o, table);
  const ModelConfig config = ModelConfig::preset(o.preset).with_vocab(lex.vocab().size(), table.size());
  config.validate();
  TrainConfig tc = TrainConfig::desk(o.steps);
  tc.batch_size = o.batch_size;
  tc.peak_lr = o.lr;
  tc.seed = o.seed;
  tc.eval_every = o.eval_every;
  tc.policy = policy_from(o);
  tc.validate();
  const Corpus corpus = prepare_corpus(read_corpus_file(o.corpus), lex, table, config.max_len);
  const TrainResult r = train(corpus, config, tc);
  save_checkpoint_file(r.params, config, o.ckpt);
  std::ostringstream csv;
  write_loss_csv(r.curve, csv);
  const std::string csv_path = o.out.empty() ? o.ckpt + ".loss.csv" : o.out;
  write_file(csv_path, csv.str());
  for (const auto& [step, report] : r.evaluations) {
    out << "step " << step << " held-out acc_phoneme " << report.acc_phoneme << " acc_sup "
        << report.acc_sup << '\n';
  }
  out << "trained " << r.curve.size() << " steps on " << corpus.train.size() << " sentences ("
      << corpus.heldout.size() << " held out)";
  if (!r.curve.empty()) out << ", final loss " << r.curve.back().loss_total;
  out << " -> " << o.ckpt << ", " << csv_path << '\n';
}

Checkpoint load_model(const Options& o, bool preset_given) {
  std::optional<ModelConfig> expected;
  if (preset_given) expected = ModelConfig::preset(o.preset);
  return load_checkpoint_file(o.ckpt, expected);
}

void eval_cmd(const Options& o, bool preset_given, std::ostream& out) {
  const Checkpoint ck = load_model(o, preset_given);
  const MergeTable table = load_merges_file(o.merges);
  const Lexicon lex = lexicon_for(o, table);
  if (ck.config.phoneme_vocab != lex.vocab().size() || ck.config.sup_vocab != table.size()) {
    throw DataError("checkpoint vocabulary sizes do not match the lexicon and merges file");
  }
  const MaskPolicy policy = policy_from(o);
  const Corpus corpus = prepare_corpus(read_corpus_file(o.corpus), lex, table, ck.config.max_len, false);
  if (corpus.train.empty()) throw EmptyInput("evaluation corpus is empty");
  const MlmReport report = eval_mlm(ck.params, ck.config, corpus.train, policy);
  emit(o, report_to_json(report, policy, ck.config), out);
}

void export_cmd(const Options& o, bool preset_given, std::ostream& out) {
  const Checkpoint ck = load_model(o, preset_given);
  const MergeTable table = load_merges_file(o.merges);
  const Lexicon lex = lexicon_for(o, table);
  if (ck.config.phoneme_vocab != lex.vocab().size() || ck.config.sup_vocab != table.size()) {
    throw DataError("checkpoint vocabulary sizes do not match the lexicon and merges file");
  }
  emit(o, export_to_json(export_embeddings(ck.params, ck.config, o.text, lex, table), table), out);
}

void add_policy_flags(CLI::App* sub, Options& o) {
  sub->add_option("--mask-ratio", o.mask_ratio, "Masking ratio")->capture_default_str();
  sub->add_flag("--wwm,!--no-wwm", o.wwm, "Whole-word masking (default on)");
  sub->add_option("--mask-mode", o.mask_mode, "mixed | phoneme-only | mask-all-sup | mask-all-phoneme")
      ->capture_default_str();
  sub->add_option("--seed", o.seed, "Random seed")->capture_default_str();
}

}  // namespace

int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Mixed phoneme / sup-phoneme BERT toolkit", "mpbert"};
  app.require_subcommand(1);

  auto* learn = app.add_subcommand("learn-bpe", "Learn phoneme BPE merges from a corpus");
  learn->add_option("--lexicon", o.lexicon, "Pronunciation lexicon")->required();
  learn->add_option("--corpus", o.corpus, "Corpus, one sentence per line")->required();
  learn->add_option("--vocab-size", o.vocab_size, "3000 | 30000 | tiny | <int>")->capture_default_str();
  learn->add_option("--out", o.out, "Merges file to write")->required();
  learn->add_flag("--keep-stress", o.keep_stress, "Keep vowel stress digits");

  auto* encode = app.add_subcommand("encode", "Print sup-phoneme tokens and spans as JSON lines");
  encode->add_option("--lexicon", o.lexicon, "Pronunciation lexicon")->required();
  encode->add_option("--merges", o.merges, "Merges file")->required();
  encode->add_option("--text", o.text, "Sentence to encode");
  encode->add_option("--corpus", o.corpus, "Corpus to encode, one sentence per line");

  auto* pretrain = app.add_subcommand("pretrain", "MLM pre-training");
  pretrain->add_option("--lexicon", o.lexicon, "Pronunciation lexicon")->required();
  pretrain->add_option("--corpus", o.corpus, "Corpus, one sentence per line")->required();
  pretrain->add_option("--merges", o.merges, "Merges file")->required();
  pretrain->add_option("--ckpt", o.ckpt, "Checkpoint to write")->required();
  pretrain->add_option("--out", o.out, "Loss CSV to write (default <ckpt>.loss.csv)");
  pretrain->add_option("--preset", o.preset, "paper | tiny")->capture_default_str();
  pretrain->add_option("--steps", o.steps, "Optimizer steps")->capture_default_str();
  pretrain->add_option("--batch-size", o.batch_size, "Sequences per step")->capture_default_str();
  pretrain->add_option("--lr", o.lr, "Peak learning rate")->capture_default_str();
  pretrain->add_option("--eval-every", o.eval_every, "Held-out evaluation period (0 = off)");
  add_policy_flags(pretrain, o);

  auto* eval = app.add_subcommand("eval-mlm", "Masked-token prediction accuracy as JSON");
  eval->add_option("--ckpt", o.ckpt, "Checkpoint")->required();
  eval->add_option("--lexicon", o.lexicon, "Pronunciation lexicon")->required();
  eval->add_option("--corpus", o.corpus, "Evaluation corpus")->required();
  eval->add_option("--merges", o.merges, "Merges file")->required();
  eval->add_option("--out", o.out, "Report file (default stdout)");
  auto* eval_preset = eval->add_option("--preset", o.preset, "Require this architecture");
  add_policy_flags(eval, o);

  auto* exp = app.add_subcommand("export", "Unmasked hidden vectors for a text as JSON");
  exp->add_option("--ckpt", o.ckpt, "Checkpoint")->required();
  exp->add_option("--lexicon", o.lexicon, "Pronunciation lexicon")->required();
  exp->add_option("--merges", o.merges, "Merges file")->required();
  exp->add_option("--text", o.text, "Text to encode")->required();
  exp->add_option("--out", o.out, "Output file (default stdout)");
  auto* exp_preset = exp->add_option("--preset", o.preset, "Require this architecture");

  std::vector<const char*> args;
  for (const auto& a : argv) args.push_back(a.c_str());
  if (args.empty()) args.push_back("mpbert");

  auto usage = [&]() -> std::string {
    for (auto* sub : app.get_subcommands()) return sub->help();
    return app.help();
  };

  try {
    app.parse(static_cast<int>(args.size()), args.data());
  } catch (const CLI::CallForHelp&) {
    out << usage();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << usage();
    return kExitUsage;
  }

  try {
    if (*learn) learn_bpe_cmd(o, out);
    if (*encode) encode_cmd(o, out);
    if (*pretrain) pretrain_cmd(o, out);
    if (*eval) eval_cmd(o, eval_preset->count() > 0, out);
    if (*exp) export_cmd(o, exp_preset->count() > 0, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n\n" << usage();
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitOk;
}

}  // namespace mpbert::cli
