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

#include "mpbert/masking.hpp"

#include <cmath>
#include <limits>

#include "mpbert/errors.hpp"
#include "mpbert/rng.hpp"

namespace mpbert {
namespace {

bool sup_level(MaskMode mode) {
  return mode == MaskMode::kMixed || mode == MaskMode::kMaskAllPhoneme;
}

MaskAction draw_action(const MaskPolicy& policy, Rng& rng) {
  const double u = rng.uniform();
  if (u < policy.p_mask) return MaskAction::kMask;
  if (u < policy.p_mask + policy.p_random) return MaskAction::kRandom;
  return MaskAction::kKeep;
}

std::int32_t random_non_special(std::size_t vocab_size, Rng& rng) {
  if (vocab_size <= static_cast<std::size_t>(special::kCount)) return special::kMask;
  return special::kCount + static_cast<std::int32_t>(rng.below(vocab_size - special::kCount));
}

std::pair<std::size_t, std::size_t> word_positions(const MaskedExample& ex, const WordSpan& w) {
  return {ex.sup_spans[w.first_sup].start, ex.sup_spans[w.last_sup - 1].end};
}

// Corrupts the selected sup tokens (and their spans) in place.
void corrupt_sup_tokens(MaskedExample& ex, const MaskPolicy& policy, const VocabSizes& vocab,
                        std::span<const std::uint8_t> selected,
                        std::optional<MaskAction> forced_action, Rng& rng) {
  for (std::size_t j = 0; j < ex.sup_spans.size(); ++j) {
    if (!selected[j]) continue;
    const SupSpan& span = ex.sup_spans[j];
    const MaskAction action = forced_action ? *forced_action : draw_action(policy, rng);
    ex.sup_masked[j] = 1;
    ex.sup_actions[j] = action;
    SupPhonemeId sup_replacement = span.sup_id;
    if (action == MaskAction::kMask) {
      sup_replacement = special::kMask;
    } else if (action == MaskAction::kRandom) {
      sup_replacement = random_non_special(vocab.sup, rng);
    }
    for (std::size_t t = span.start; t < span.end; ++t) {
      ex.pos_masked[t] = 1;
      ex.pos_actions[t] = action;
      ex.input_sup_ids_upsampled[t] = sup_replacement;
      if (action == MaskAction::kMask) {
        ex.input_phoneme_ids[t] = special::kMask;
      } else if (action == MaskAction::kRandom) {
        ex.input_phoneme_ids[t] = random_non_special(vocab.phoneme, rng);
      }
    }
  }
}

MaskedExample phoneme_level_masks(const MixedSequence& seq, const MaskPolicy& policy,
                                  const VocabSizes& vocab) {
  Rng rng(policy.seed);
  MaskedExample ex = unmasked_example(seq);
  ex.mode = policy.mode;
  const std::size_t T = ex.length();

  std::vector<std::uint8_t> selected(T, 0);
  if (policy.whole_word) {
    for (const auto& w : ex.word_spans) {
      const auto [begin, end] = word_positions(ex, w);
      bool any_candidate = false;
      for (std::size_t t = begin; t < end; ++t) {
        any_candidate |= !special::is_special(seq.phoneme_ids[t]);
      }
      if (!any_candidate) continue;
      const bool hit = rng.bernoulli(policy.ratio);
      for (std::size_t t = begin; t < end; ++t) {
        selected[t] = hit && !special::is_special(seq.phoneme_ids[t]);
      }
    }
  } else {
    for (std::size_t t = 0; t < T; ++t) {
      if (!special::is_special(seq.phoneme_ids[t])) selected[t] = rng.bernoulli(policy.ratio);
    }
  }

  for (std::size_t t = 0; t < T; ++t) {
    if (!selected[t]) continue;
    const MaskAction action = draw_action(policy, rng);
    ex.pos_masked[t] = 1;
    ex.pos_actions[t] = action;
    if (action == MaskAction::kMask) {
      ex.input_phoneme_ids[t] = special::kMask;
    } else if (action == MaskAction::kRandom) {
      ex.input_phoneme_ids[t] = random_non_special(vocab.phoneme, rng);
    }
  }

  if (policy.mode == MaskMode::kPhonemeOnly) {
    for (auto& s : ex.input_sup_ids_upsampled) s = special::kPad;
    return ex;
  }

  // kMaskAllSup: every non-special sup token is hidden; the ones overlapping a
  // masked phoneme become prediction targets.
  for (std::size_t j = 0; j < ex.sup_spans.size(); ++j) {
    const SupSpan& span = ex.sup_spans[j];
    if (special::is_special(span.sup_id)) continue;
    bool any = false;
    for (std::size_t t = span.start; t < span.end; ++t) {
      ex.input_sup_ids_upsampled[t] = special::kMask;
      any |= ex.pos_masked[t] != 0;
    }
    if (any) {
      ex.sup_masked[j] = 1;
      ex.sup_actions[j] = MaskAction::kMask;
    }
  }
  return ex;
}

MaskedExample sup_level_masks(const MixedSequence& seq, const MaskPolicy& policy,
                              const VocabSizes& vocab, std::vector<std::uint8_t> selected,
                              std::optional<MaskAction> forced_action, Rng& rng) {
  MaskedExample ex = unmasked_example(seq);
  ex.mode = policy.mode;
  for (std::size_t j = 0; j < selected.size(); ++j) {
    if (special::is_special(seq.sup_spans[j].sup_id)) selected[j] = 0;
  }
  if (policy.whole_word) {
    for (const auto& w : seq.word_spans) {
      bool hit = false;
      for (std::size_t j = w.first_sup; j < w.last_sup; ++j) hit |= selected[j] != 0;
      if (!hit) continue;
      for (std::size_t j = w.first_sup; j < w.last_sup; ++j) {
        selected[j] = !special::is_special(seq.sup_spans[j].sup_id);
      }
    }
  }
  corrupt_sup_tokens(ex, policy, vocab, selected, forced_action, rng);

  if (policy.mode == MaskMode::kMaskAllPhoneme) {
    for (std::size_t t = 0; t < ex.length(); ++t) {
      if (!special::is_special(ex.target_phoneme_ids[t])) ex.input_phoneme_ids[t] = special::kMask;
    }
  }
  return ex;
}

}  // namespace

std::string_view to_string(MaskMode mode) {
  switch (mode) {
    case MaskMode::kMixed: return "mixed";
    case MaskMode::kPhonemeOnly: return "phoneme-only";
    case MaskMode::kMaskAllSup: return "mask-all-sup";
    case MaskMode::kMaskAllPhoneme: return "mask-all-phoneme";
  }
  return "mixed";
}

MaskMode parse_mask_mode(std::string_view name) {
  std::string n(name);
  for (auto& c : n) {
    if (c == '_') c = '-';
  }
  if (n == "mixed") return MaskMode::kMixed;
  if (n == "phoneme-only") return MaskMode::kPhonemeOnly;
  if (n == "mask-all-sup") return MaskMode::kMaskAllSup;
  if (n == "mask-all-phoneme") return MaskMode::kMaskAllPhoneme;
  throw ConfigError("unknown mask mode '" + std::string(name) + "'");
}

void MaskPolicy::validate() const {
  if (!(ratio >= 0.0 && ratio <= 1.0)) throw ConfigError("mask ratio must lie in [0, 1]");
  if (p_mask < 0 || p_random < 0 || p_keep < 0 ||
      std::abs(p_mask + p_random + p_keep - 1.0) > 1e-9) {
    throw ConfigError("MASK/RANDOM/KEEP split must be non-negative and sum to 1");
  }
}

std::size_t MaskedExample::masked_positions() const {
  std::size_t n = 0;
  for (auto m : pos_masked) n += m;
  return n;
}

std::size_t MaskedExample::masked_sup_tokens() const {
  std::size_t n = 0;
  for (auto m : sup_masked) n += m;
  return n;
}

MaskedExample unmasked_example(const MixedSequence& seq) {
  MaskedExample ex;
  ex.input_phoneme_ids = seq.phoneme_ids;
  ex.input_sup_ids_upsampled = seq.sup_ids_upsampled;
  ex.target_phoneme_ids = seq.phoneme_ids;
  ex.target_sup_ids.reserve(seq.sup_spans.size());
  for (const auto& s : seq.sup_spans) ex.target_sup_ids.push_back(s.sup_id);
  ex.sup_spans = seq.sup_spans;
  ex.word_spans = seq.word_spans;
  ex.sup_masked.assign(seq.sup_spans.size(), 0);
  ex.pos_masked.assign(seq.length(), 0);
  ex.sup_actions.assign(seq.sup_spans.size(), MaskAction::kNone);
  ex.pos_actions.assign(seq.length(), MaskAction::kNone);
  return ex;
}

MaskedExample select_masks(const MixedSequence& seq, const MaskPolicy& policy,
                           const VocabSizes& vocab) {
  policy.validate();
  if (!sup_level(policy.mode)) return phoneme_level_masks(seq, policy, vocab);

  Rng rng(policy.seed);
  std::vector<std::uint8_t> selected(seq.sup_spans.size(), 0);
  if (policy.whole_word) {
    for (const auto& w : seq.word_spans) {
      bool any_candidate = false;
      for (std::size_t j = w.first_sup; j < w.last_sup; ++j) {
        any_candidate |= !special::is_special(seq.sup_spans[j].sup_id);
      }
      if (!any_candidate) continue;
      const bool hit = rng.bernoulli(policy.ratio);
      for (std::size_t j = w.first_sup; j < w.last_sup; ++j) selected[j] = hit;
    }
  } else {
    for (std::size_t j = 0; j < seq.sup_spans.size(); ++j) {
      if (!special::is_special(seq.sup_spans[j].sup_id)) selected[j] = rng.bernoulli(policy.ratio);
    }
  }
  return sup_level_masks(seq, policy, vocab, std::move(selected), std::nullopt, rng);
}

MaskedExample apply_sup_selection(const MixedSequence& seq, const MaskPolicy& policy,
                                  const VocabSizes& vocab, std::span<const std::uint8_t> selected,
                                  std::optional<MaskAction> forced_action) {
  policy.validate();
  if (!sup_level(policy.mode)) throw ConfigError("sup-token selection requires a sup-level mask mode");
  if (selected.size() != seq.sup_spans.size()) throw IndexError("selection size mismatch");
  Rng rng(policy.seed);
  return sup_level_masks(seq, policy, vocab, {selected.begin(), selected.end()}, forced_action, rng);
}

MaskStatistics mask_statistics(std::span<const MaskedExample> examples) {
  if (examples.empty()) throw EmptyInput("mask_statistics needs at least one example");
  MaskStatistics stats;
  std::size_t counts[4] = {0, 0, 0, 0};
  for (const auto& ex : examples) {
    if (sup_level(ex.mode)) {
      for (std::size_t j = 0; j < ex.sup_spans.size(); ++j) {
        if (special::is_special(ex.target_sup_ids[j])) continue;
        ++stats.candidates;
        if (ex.sup_masked[j]) {
          ++stats.masked;
          ++counts[static_cast<int>(ex.sup_actions[j])];
        }
      }
    } else {
      for (std::size_t t = 0; t < ex.length(); ++t) {
        if (special::is_special(ex.target_phoneme_ids[t])) continue;
        ++stats.candidates;
        if (ex.pos_masked[t]) {
          ++stats.masked;
          ++counts[static_cast<int>(ex.pos_actions[t])];
        }
      }
    }
  }
  stats.masked_fraction =
      stats.candidates ? static_cast<double>(stats.masked) / static_cast<double>(stats.candidates) : 0.0;
  if (stats.masked == 0) {
    stats.mask_fraction = stats.random_fraction = stats.keep_fraction =
        std::numeric_limits<double>::quiet_NaN();
  } else {
    const auto m = static_cast<double>(stats.masked);
    stats.mask_fraction = static_cast<double>(counts[static_cast<int>(MaskAction::kMask)]) / m;
    stats.random_fraction = static_cast<double>(counts[static_cast<int>(MaskAction::kRandom)]) / m;
    stats.keep_fraction = static_cast<double>(counts[static_cast<int>(MaskAction::kKeep)]) / m;
  }
  return stats;
}

std::string check_mask_consistency(const MaskedExample& ex, bool whole_word) {
  for (std::size_t t = 0; t < ex.length(); ++t) {
    if (special::is_special(ex.target_phoneme_ids[t]) && ex.pos_masked[t]) {
      return "special position " + std::to_string(t) + " is masked";
    }
  }
  for (std::size_t j = 0; j < ex.sup_spans.size(); ++j) {
    if (special::is_special(ex.target_sup_ids[j]) && ex.sup_masked[j]) {
      return "special sup token " + std::to_string(j) + " is masked";
    }
  }
  if (ex.mode == MaskMode::kMixed || ex.mode == MaskMode::kMaskAllPhoneme) {
    std::vector<std::uint8_t> covered(ex.length(), 0);
    for (std::size_t j = 0; j < ex.sup_spans.size(); ++j) {
      const auto& span = ex.sup_spans[j];
      bool all = true;
      for (std::size_t t = span.start; t < span.end; ++t) {
        all &= ex.pos_masked[t] != 0;
        covered[t] = ex.sup_masked[j];
      }
      if (static_cast<bool>(ex.sup_masked[j]) != all) {
        return "sup token " + std::to_string(j) + " violates the consistency biconditional";
      }
    }
    for (std::size_t t = 0; t < ex.length(); ++t) {
      if (ex.pos_masked[t] && !covered[t]) {
        return "position " + std::to_string(t) + " masked outside any masked span";
      }
    }
    if (whole_word) {
      for (const auto& w : ex.word_spans) {
        std::size_t masked = 0, candidates = 0;
        for (std::size_t j = w.first_sup; j < w.last_sup; ++j) {
          if (special::is_special(ex.target_sup_ids[j])) continue;
          ++candidates;
          masked += ex.sup_masked[j];
        }
        if (masked != 0 && masked != candidates) return "masked set is not a union of whole words";
      }
    }
  }
  return {};
}

}  // namespace mpbert
