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

// Binary checkpoint layout (all integers little-endian):
//
//   "MPB1"
//   u32 config length, config document (key=value lines)
//   u32 tensor count
//   per tensor: u32 name length, name, u8 dtype (1 = f64), u32 rows, u32 cols,
//               rows*cols f64 values in row-major order
//   u32 CRC-32 of every preceding byte

#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "mpbert/encoder.hpp"
#include "mpbert/model_config.hpp"

namespace mpbert {

struct Checkpoint {
  ModelConfig config;
  EncoderParams params;
};

std::string serialize_checkpoint(const EncoderParams& params, const ModelConfig& config);
void save_checkpoint(const EncoderParams& params, const ModelConfig& config, std::ostream& out);
void save_checkpoint_file(const EncoderParams& params, const ModelConfig& config,
                          const std::string& path);

/// Throws CheckpointError on a bad magic, truncation, checksum mismatch, or
/// when `expected` is given and the stored architecture differs from it
/// (vocabulary sizes of `expected` are ignored when zero).
Checkpoint deserialize_checkpoint(const std::string& bytes,
                                  const std::optional<ModelConfig>& expected = std::nullopt);
Checkpoint load_checkpoint(std::istream& in,
                           const std::optional<ModelConfig>& expected = std::nullopt);
Checkpoint load_checkpoint_file(const std::string& path,
                                const std::optional<ModelConfig>& expected = std::nullopt);

}  // namespace mpbert
