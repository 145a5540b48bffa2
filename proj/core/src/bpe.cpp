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

#include "mpbert/bpe.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <queue>
#include <set>
#include <sstream>
#include <unordered_set>

#include "mpbert/errors.hpp"

namespace mpbert {
namespace {

std::string lowercase(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

MergeTable::MergeTable(std::vector<std::string> base_symbols, bool strip_stress)
    : base_symbols_(std::move(base_symbols)), strip_stress_(strip_stress) {
  for (auto s : special::kSymbols) push_token(std::string(s), {std::string(s)});
  for (const auto& sym : base_symbols_) {
    if (sym.empty() || sym.find('-') != std::string::npos ||
        sym.find_first_of(" \t") != std::string::npos) {
      throw ConfigError("invalid base symbol '" + sym + "'");
    }
    const SupPhonemeId id = push_token(lowercase(sym), {sym});
    if (!base_index_.emplace(sym, id).second) {
      throw ConfigError("duplicate base symbol '" + sym + "'");
    }
  }
  target_size_ = base_symbols_.size();
}

MergeTable MergeTable::for_vocab(const PhonemeVocab& vocab) {
  return MergeTable(vocab.base_symbols(), vocab.strip_stress());
}

SupPhonemeId MergeTable::push_token(std::string surface, std::vector<std::string> decomposition) {
  const auto id = static_cast<SupPhonemeId>(surfaces_.size());
  if (!surface_index_.emplace(surface, id).second) {
    throw ConfigError("duplicate sup-phoneme surface '" + surface + "'");
  }
  surfaces_.push_back(std::move(surface));
  decompositions_.push_back(std::move(decomposition));
  return id;
}

SupPhonemeId MergeTable::add_merge(SupPhonemeId left, SupPhonemeId right) {
  if (!contains(left) || !contains(right)) throw UnknownToken("merge operand out of range");
  if (special::is_special(left) || special::is_special(right)) {
    throw ConfigError("special tokens cannot be merged");
  }
  if (ranks_.contains(key(left, right))) throw ConfigError("duplicate merge rule");
  std::vector<std::string> dec = decompositions_[left];
  const auto& rhs = decompositions_[right];
  dec.insert(dec.end(), rhs.begin(), rhs.end());
  const SupPhonemeId id = push_token(surfaces_[left] + "-" + surfaces_[right], std::move(dec));
  ranks_.emplace(key(left, right), merges_.size());
  merges_.emplace_back(left, right);
  return id;
}

const std::string& MergeTable::surface(SupPhonemeId id) const {
  if (!contains(id)) throw UnknownToken("sup-phoneme id " + std::to_string(id) + " unknown");
  return surfaces_[static_cast<std::size_t>(id)];
}

std::optional<SupPhonemeId> MergeTable::find(std::string_view surface) const {
  auto it = surface_index_.find(std::string(surface));
  if (it == surface_index_.end()) return std::nullopt;
  return it->second;
}

const std::vector<std::string>& MergeTable::decompose(SupPhonemeId id) const {
  if (!contains(id)) throw UnknownToken("sup-phoneme id " + std::to_string(id) + " unknown");
  return decompositions_[static_cast<std::size_t>(id)];
}

std::optional<SupPhonemeId> MergeTable::base_token(std::string_view phoneme_symbol) const {
  for (std::int32_t s = 0; s < special::kCount; ++s) {
    if (special::kSymbols[s] == phoneme_symbol) return s;
  }
  auto it = base_index_.find(std::string(phoneme_symbol));
  if (it == base_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> MergeTable::rank(SupPhonemeId left, SupPhonemeId right) const {
  auto it = ranks_.find(key(left, right));
  if (it == ranks_.end()) return std::nullopt;
  return it->second;
}

std::vector<SupPhonemeId> MergeTable::apply_merges(std::vector<SupPhonemeId> tokens) const {
  const auto first_merge = static_cast<SupPhonemeId>(special::kCount + base_symbols_.size());
  while (tokens.size() > 1) {
    std::size_t best = merges_.size();
    for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
      if (auto r = rank(tokens[i], tokens[i + 1]); r && *r < best) best = *r;
    }
    if (best == merges_.size()) break;
    const auto [left, right] = merges_[best];
    const SupPhonemeId merged = first_merge + static_cast<SupPhonemeId>(best);
    std::vector<SupPhonemeId> next;
    next.reserve(tokens.size());
    for (std::size_t i = 0; i < tokens.size();) {
      if (i + 1 < tokens.size() && tokens[i] == left && tokens[i + 1] == right) {
        next.push_back(merged);
        i += 2;
      } else {
        next.push_back(tokens[i]);
        ++i;
      }
    }
    tokens = std::move(next);
  }
  return tokens;
}

namespace {

struct HeapEntry {
  std::int64_t count;
  SupPhonemeId left;
  SupPhonemeId right;
};

// Merges one occurrence pattern left to right, non-overlapping.
void merge_in_place(std::vector<SupPhonemeId>& word, SupPhonemeId left, SupPhonemeId right,
                    SupPhonemeId merged) {
  std::size_t out = 0;
  for (std::size_t i = 0; i < word.size();) {
    if (i + 1 < word.size() && word[i] == left && word[i + 1] == right) {
      word[out++] = merged;
      i += 2;
    } else {
      word[out++] = word[i++];
    }
  }
  word.resize(out);
}

}  // namespace

MergeTable learn_bpe(const WordFreqs& word_freqs, std::size_t target_size,
                     std::vector<std::string> base_symbols, bool strip_stress) {
  MergeTable table(std::move(base_symbols), strip_stress);
  if (target_size < table.base_size()) {
    throw ConfigError("target vocabulary size " + std::to_string(target_size) +
                      " is smaller than the base size " + std::to_string(table.base_size()));
  }
  table.set_target_size(target_size);

  std::vector<std::vector<SupPhonemeId>> words;
  std::vector<std::int64_t> freqs;
  for (const auto& [symbols, freq] : word_freqs) {
    if (symbols.empty()) throw DataError("empty word in BPE corpus");
    if (freq == 0) continue;
    std::vector<SupPhonemeId> ids;
    ids.reserve(symbols.size());
    for (const auto& s : symbols) {
      auto id = table.base_token(s);
      if (!id || special::is_special(*id)) throw UnknownPhoneme(s);
      ids.push_back(*id);
    }
    words.push_back(std::move(ids));
    freqs.push_back(static_cast<std::int64_t>(freq));
  }

  auto key = [](SupPhonemeId l, SupPhonemeId r) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(l)) << 32) |
           static_cast<std::uint32_t>(r);
  };
  std::unordered_map<std::uint64_t, std::int64_t> counts;
  std::unordered_map<std::uint64_t, std::unordered_set<std::size_t>> where;
  for (std::size_t w = 0; w < words.size(); ++w) {
    for (std::size_t i = 0; i + 1 < words[w].size(); ++i) {
      const auto k = key(words[w][i], words[w][i + 1]);
      counts[k] += freqs[w];
      where[k].insert(w);
    }
  }

  // Max count first; among equal counts the lexicographically smallest pair.
  auto worse = [&table](const HeapEntry& a, const HeapEntry& b) {
    if (a.count != b.count) return a.count < b.count;
    const auto& al = table.surface(a.left);
    const auto& bl = table.surface(b.left);
    if (al != bl) return al > bl;
    return table.surface(a.right) > table.surface(b.right);
  };
  std::priority_queue<HeapEntry, std::vector<HeapEntry>, decltype(worse)> heap(worse);
  for (const auto& [k, c] : counts) {
    heap.push({c, static_cast<SupPhonemeId>(k >> 32), static_cast<SupPhonemeId>(k & 0xffffffffu)});
  }

  std::unordered_set<std::uint64_t> banned;
  while (table.size() - special::kCount < target_size && !heap.empty()) {
    const HeapEntry top = heap.top();
    heap.pop();
    const auto k = key(top.left, top.right);
    auto it = counts.find(k);
    if (it == counts.end() || it->second != top.count) continue;  // stale
    if (top.count < 2) break;
    if (banned.contains(k)) continue;
    // Different operand splits can spell the same surface ("a-b"+"c" vs
    // "a"+"b-c"); such a pair is never merged so surfaces stay unique.
    if (table.find(table.surface(top.left) + "-" + table.surface(top.right))) {
      banned.insert(k);
      continue;
    }

    const SupPhonemeId merged = table.add_merge(top.left, top.right);
    std::vector<std::size_t> affected(where[k].begin(), where[k].end());
    std::sort(affected.begin(), affected.end());
    std::set<std::uint64_t> touched;
    for (std::size_t w : affected) {
      auto& word = words[w];
      const std::int64_t f = freqs[w];
      for (std::size_t i = 0; i + 1 < word.size(); ++i) {
        const auto pk = key(word[i], word[i + 1]);
        counts[pk] -= f;
        touched.insert(pk);
      }
      merge_in_place(word, top.left, top.right, merged);
      for (std::size_t i = 0; i + 1 < word.size(); ++i) {
        const auto pk = key(word[i], word[i + 1]);
        counts[pk] += f;
        where[pk].insert(w);
        touched.insert(pk);
      }
    }
    for (auto pk : touched) {
      auto c = counts.find(pk);
      if (c->second <= 0) {
        counts.erase(c);
        where.erase(pk);
      } else {
        heap.push({c->second, static_cast<SupPhonemeId>(pk >> 32),
                   static_cast<SupPhonemeId>(pk & 0xffffffffu)});
      }
    }
  }
  return table;
}

MergeTable learn_bpe(const WordFreqs& word_freqs, std::size_t target_size) {
  std::set<std::string> distinct;
  for (const auto& [symbols, freq] : word_freqs) distinct.insert(symbols.begin(), symbols.end());
  return learn_bpe(word_freqs, target_size, {distinct.begin(), distinct.end()});
}

std::vector<SupPhonemeToken> encode_word(std::span<const PhonemeId> phonemes,
                                         const PhonemeVocab& vocab, const MergeTable& table) {
  std::vector<SupPhonemeId> base;
  base.reserve(phonemes.size());
  for (PhonemeId p : phonemes) {
    const std::string& sym = vocab.symbol(p);
    auto id = table.base_token(sym);
    if (!id) throw UnknownToken("phoneme '" + sym + "' is not a base symbol of the merge table");
    base.push_back(*id);
  }
  std::vector<SupPhonemeToken> out;
  for (SupPhonemeId id : table.apply_merges(std::move(base))) {
    out.push_back({id, table.span_len(id)});
  }
  return out;
}

std::vector<SupPhonemeToken> encode_symbols(std::span<const std::string> phonemes,
                                            const MergeTable& table) {
  std::vector<SupPhonemeId> base;
  base.reserve(phonemes.size());
  for (const auto& sym : phonemes) {
    auto id = table.base_token(sym);
    if (!id) throw UnknownToken("phoneme '" + sym + "' is not a base symbol of the merge table");
    base.push_back(*id);
  }
  std::vector<SupPhonemeToken> out;
  for (SupPhonemeId id : table.apply_merges(std::move(base))) {
    out.push_back({id, table.span_len(id)});
  }
  return out;
}

std::size_t resolve_vocab_size(std::string_view preset, std::size_t base_size) {
  if (preset == "tiny") return base_size + kTinyMerges;
  std::size_t n = 0;
  const auto* end = preset.data() + preset.size();
  auto [ptr, ec] = std::from_chars(preset.data(), end, n);
  if (preset.empty() || ec != std::errc{} || ptr != end) {
    throw ConfigError("invalid vocabulary size '" + std::string(preset) + "'");
  }
  return n;
}

void save_merges(const MergeTable& table, std::ostream& out) {
  out << "#mpbert-bpe v1 size=" << table.target_size()
      << " strip_stress=" << (table.strip_stress() ? "true" : "false") << '\n';
  out << "#base";
  for (const auto& s : table.base_symbols()) out << ' ' << s;
  out << '\n';
  for (const auto& [l, r] : table.merges()) {
    out << table.surface(l) << ' ' << table.surface(r) << '\n';
  }
}

MergeTable load_merges(std::istream& in) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw ParseError(1, "missing merges header");
  std::istringstream header(line);
  std::string magic, version, size_field, stress_field;
  header >> magic >> version >> size_field >> stress_field;
  if (magic != "#mpbert-bpe") throw ParseError(1, "not a merges file");
  if (version != "v1") throw ParseError(1, "unsupported merges version '" + version + "'");
  if (!size_field.starts_with("size=") || !stress_field.starts_with("strip_stress=")) {
    throw ParseError(1, "malformed header");
  }
  std::size_t target = 0;
  try {
    target = resolve_vocab_size(size_field.substr(5), 0);
  } catch (const ConfigError&) {
    throw ParseError(1, "malformed size field");
  }
  const std::string stress = stress_field.substr(13);
  if (stress != "true" && stress != "false") throw ParseError(1, "malformed strip_stress field");
  const bool strip = stress == "true";

  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);

  std::size_t next = 0;
  std::vector<std::string> base;
  if (!lines.empty() && lines[0].starts_with("#base")) {
    std::istringstream fields(lines[0].substr(5));
    for (std::string s; fields >> s;) base.push_back(s);
    next = 1;
  } else {
    base = PhonemeVocab::arpabet(strip).base_symbols();
  }

  MergeTable table;
  try {
    table = MergeTable(std::move(base), strip);
  } catch (const ConfigError& e) {
    throw ParseError(2, e.what());
  }
  for (; next < lines.size(); ++next) {
    line_no = next + 2;
    if (!lines[next].empty() && lines[next].back() == '\r') lines[next].pop_back();
    if (lines[next].empty()) continue;
    std::istringstream fields(lines[next]);
    std::string left, right, extra;
    if (!(fields >> left >> right) || (fields >> extra)) {
      throw ParseError(line_no, "expected 'LEFT RIGHT'");
    }
    const auto l = table.find(left);
    const auto r = table.find(right);
    if (!l || !r) throw ParseError(line_no, "merge references an unseen operand");
    try {
      table.add_merge(*l, *r);
    } catch (const Error& e) {
      throw ParseError(line_no, e.what());
    }
  }
  table.set_target_size(target);
  return table;
}

void save_merges_file(const MergeTable& table, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write merges file '" + path + "'");
  save_merges(table, out);
}

MergeTable load_merges_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open merges file '" + path + "'");
  return load_merges(in);
}

}  // namespace mpbert
