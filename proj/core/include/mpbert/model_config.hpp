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

#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>

namespace mpbert {

/// Hyperparameters of the FFT-block encoder and its MLM heads.
struct ModelConfig {
  std::size_t layers = 2;
  std::size_t hidden = 32;
  std::size_t heads = 2;
  std::size_t ff_filter = 64;
  std::size_t ff_kernel1 = 3;
  std::size_t ff_kernel2 = 1;
  double dropout = 0.1;
  std::size_t max_len = 64;
  std::size_t phoneme_vocab = 0;
  std::size_t sup_vocab = 0;

  /// 8 blocks, hidden 512, 8 heads, max length 512, conv feed-forward 9/1 with filter 2048.
  static ModelConfig paper();
  /// 2 blocks, hidden 32, 2 heads, max length 64, conv feed-forward 3/1 with filter 64.
  static ModelConfig tiny();
  /// "paper" or "tiny"; throws ConfigError otherwise.
  static ModelConfig preset(std::string_view name);

  ModelConfig with_vocab(std::size_t phoneme, std::size_t sup) const {
    ModelConfig c = *this;
    c.phoneme_vocab = phoneme;
    c.sup_vocab = sup;
    return c;
  }

  std::size_t head_dim() const { return hidden / heads; }

  /// Throws ConfigError: hidden % heads, odd kernels, positive sizes, dropout in [0, 1).
  void validate() const;

  /// key=value lines, sorted by key; the textual config document of checkpoints.
  std::string to_document() const;
  static ModelConfig from_document(std::string_view doc);

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

}  // namespace mpbert
