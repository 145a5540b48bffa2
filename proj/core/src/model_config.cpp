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

#include "mpbert/model_config.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>

#include "mpbert/errors.hpp"

namespace mpbert {

ModelConfig ModelConfig::paper() {
  ModelConfig c;
  c.layers = 8;
  c.hidden = 512;
  c.heads = 8;
  c.ff_filter = 2048;
  c.ff_kernel1 = 9;
  c.ff_kernel2 = 1;
  c.dropout = 0.1;
  c.max_len = 512;
  return c;
}

ModelConfig ModelConfig::tiny() { return ModelConfig{}; }

ModelConfig ModelConfig::preset(std::string_view name) {
  if (name == "paper") return paper();
  if (name == "tiny") return tiny();
  throw ConfigError("unknown model preset '" + std::string(name) + "'");
}

void ModelConfig::validate() const {
  if (layers == 0 || hidden == 0 || heads == 0 || ff_filter == 0 || max_len == 0) {
    throw ConfigError("model sizes must be positive");
  }
  if (hidden % heads != 0) throw ConfigError("hidden size must be divisible by the head count");
  if (ff_kernel1 % 2 == 0 || ff_kernel2 % 2 == 0) throw ConfigError("conv kernels must be odd");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("dropout must lie in [0, 1)");
}

std::string ModelConfig::to_document() const {
  char dropout_text[64];
  std::snprintf(dropout_text, sizeof dropout_text, "%.17g", dropout);
  std::ostringstream doc;
  doc << "dropout=" << dropout_text << '\n'
      << "ff_filter=" << ff_filter << '\n'
      << "ff_kernel1=" << ff_kernel1 << '\n'
      << "ff_kernel2=" << ff_kernel2 << '\n'
      << "heads=" << heads << '\n'
      << "hidden=" << hidden << '\n'
      << "layers=" << layers << '\n'
      << "max_len=" << max_len << '\n'
      << "phoneme_vocab=" << phoneme_vocab << '\n'
      << "sup_vocab=" << sup_vocab << '\n';
  return doc.str();
}

ModelConfig ModelConfig::from_document(std::string_view doc) {
  ModelConfig c;
  std::map<std::string, std::string> fields;
  std::istringstream in{std::string(doc)};
  for (std::string line; std::getline(in, line);) {
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("malformed config line '" + line + "'");
    fields[line.substr(0, eq)] = line.substr(eq + 1);
  }
  auto size_field = [&](const char* key, std::size_t& out) {
    auto it = fields.find(key);
    if (it == fields.end()) throw ConfigError(std::string("config document lacks '") + key + "'");
    const auto& v = it->second;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size()) {
      throw ConfigError(std::string("bad value for '") + key + "'");
    }
  };
  size_field("layers", c.layers);
  size_field("hidden", c.hidden);
  size_field("heads", c.heads);
  size_field("ff_filter", c.ff_filter);
  size_field("ff_kernel1", c.ff_kernel1);
  size_field("ff_kernel2", c.ff_kernel2);
  size_field("max_len", c.max_len);
  size_field("phoneme_vocab", c.phoneme_vocab);
  size_field("sup_vocab", c.sup_vocab);
  auto it = fields.find("dropout");
  if (it == fields.end()) throw ConfigError("config document lacks 'dropout'");
  try {
    c.dropout = std::stod(it->second);
  } catch (const std::exception&) {
    throw ConfigError("bad value for 'dropout'");
  }
  return c;
}

}  // namespace mpbert
