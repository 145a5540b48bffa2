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

#include <cstring>
#include <sstream>

#include "fixtures.hpp"
#include "mpbert/checkpoint.hpp"
#include "mpbert/errors.hpp"

namespace mpbert {
namespace {

ModelConfig tiny() { return ModelConfig::tiny().with_vocab(51, 115); }

bool bitwise_equal(const EncoderParams& a, const EncoderParams& b) {
  std::vector<const Matrix*> left;
  a.visit([&](const std::string&, const Matrix& m) { left.push_back(&m); });
  std::size_t k = 0;
  bool equal = true;
  b.visit([&](const std::string&, const Matrix& m) {
    const Matrix& l = *left[k++];
    equal = equal && l.rows() == m.rows() && l.cols() == m.cols() &&
            std::memcmp(l.data(), m.data(), sizeof(double) * static_cast<std::size_t>(m.size())) == 0;
  });
  return equal && k == left.size();
}

TEST(Checkpoint, RoundTripIsBitExact) {
  const ModelConfig c = tiny();
  const EncoderParams p = testing::random_params(c, 1, 0.7);
  const Checkpoint back = deserialize_checkpoint(serialize_checkpoint(p, c));
  EXPECT_EQ(back.config, c);
  EXPECT_TRUE(bitwise_equal(back.params, p));
}

TEST(Checkpoint, StreamRoundTrip) {
  const ModelConfig c = tiny();
  const EncoderParams p = init_params(c, 2);
  std::stringstream io;
  save_checkpoint(p, c, io);
  const Checkpoint back = load_checkpoint(io, c);
  EXPECT_TRUE(bitwise_equal(back.params, p));
}

TEST(Checkpoint, StartsWithMagic) {
  const std::string bytes = serialize_checkpoint(zero_params(tiny()), tiny());
  EXPECT_EQ(bytes.substr(0, 4), "MPB1");
}

TEST(Checkpoint, TruncatedStreamIsRejected) {
  const std::string bytes = serialize_checkpoint(init_params(tiny(), 3), tiny());
  for (std::size_t len : {std::size_t{0}, std::size_t{3}, std::size_t{10}, bytes.size() / 2, bytes.size() - 1}) {
    EXPECT_THROW(deserialize_checkpoint(bytes.substr(0, len)), CheckpointError) << len;
  }
}

TEST(Checkpoint, CorruptionIsRejected) {
  std::string bytes = serialize_checkpoint(init_params(tiny(), 3), tiny());
  bytes[bytes.size() / 2] ^= 0x40;
  EXPECT_THROW(deserialize_checkpoint(bytes), CheckpointError);
  std::string magic = serialize_checkpoint(init_params(tiny(), 3), tiny());
  magic[3] = '2';
  EXPECT_THROW(deserialize_checkpoint(magic), CheckpointError);
}

TEST(Checkpoint, TinyCheckpointUnderPaperPresetIsShapeError) {
  const std::string bytes = serialize_checkpoint(init_params(tiny(), 4), tiny());
  try {
    deserialize_checkpoint(bytes, ModelConfig::paper());
    FAIL() << "expected CheckpointError";
  } catch (const CheckpointError& e) {
    EXPECT_NE(std::string(e.what()).find("shape"), std::string::npos) << e.what();
  }
  EXPECT_NO_THROW(deserialize_checkpoint(bytes, ModelConfig::tiny()));
  EXPECT_THROW(deserialize_checkpoint(bytes, ModelConfig::tiny().with_vocab(60, 115)), CheckpointError);
}

TEST(Checkpoint, MissingFileIsDataError) {
  EXPECT_THROW(load_checkpoint_file("/nonexistent/dir/model.ckpt"), DataError);
}

}  // namespace
}  // namespace mpbert
