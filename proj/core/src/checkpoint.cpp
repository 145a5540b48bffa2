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

#include "mpbert/checkpoint.hpp"

#include <zlib.h>

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "mpbert/errors.hpp"

namespace mpbert {
namespace {

constexpr char kMagic[4] = {'M', 'P', 'B', '1'};
constexpr std::uint8_t kDtypeF64 = 1;

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint32_t crc_of(const char* data, std::size_t n) {
  return static_cast<std::uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(data), static_cast<uInt>(n)));
}

class Reader {
 public:
  explicit Reader(const std::string& bytes, std::size_t end) : bytes_(bytes), end_(end) {}

  void need(std::size_t n) const {
    if (pos_ + n > end_) throw CheckpointError("checkpoint is truncated");
  }
  std::uint8_t u8() {
    need(1);
    return static_cast<std::uint8_t>(bytes_[pos_++]);
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<std::uint8_t>(bytes_[pos_++])) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<std::uint8_t>(bytes_[pos_++])) << (8 * i);
    return v;
  }
  std::string str(std::size_t n) {
    need(n);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::size_t pos() const { return pos_; }

 private:
  const std::string& bytes_;
  std::size_t end_;
  std::size_t pos_ = 0;
};

bool same_architecture(const ModelConfig& stored, const ModelConfig& want) {
  return stored.layers == want.layers && stored.hidden == want.hidden && stored.heads == want.heads &&
         stored.ff_filter == want.ff_filter && stored.ff_kernel1 == want.ff_kernel1 &&
         stored.ff_kernel2 == want.ff_kernel2 && stored.max_len == want.max_len &&
         (want.phoneme_vocab == 0 || stored.phoneme_vocab == want.phoneme_vocab) &&
         (want.sup_vocab == 0 || stored.sup_vocab == want.sup_vocab);
}

}  // namespace

std::string serialize_checkpoint(const EncoderParams& params, const ModelConfig& config) {
  check_shapes(params, config);
  std::string out(kMagic, 4);
  const std::string doc = config.to_document();
  put_u32(out, static_cast<std::uint32_t>(doc.size()));
  out += doc;
  std::uint32_t count = 0;
  params.visit([&count](const std::string&, const Matrix&) { ++count; });
  put_u32(out, count);
  params.visit([&out](const std::string& name, const Matrix& m) {
    put_u32(out, static_cast<std::uint32_t>(name.size()));
    out += name;
    out.push_back(static_cast<char>(kDtypeF64));
    put_u32(out, static_cast<std::uint32_t>(m.rows()));
    put_u32(out, static_cast<std::uint32_t>(m.cols()));
    for (Eigen::Index i = 0; i < m.size(); ++i) put_u64(out, std::bit_cast<std::uint64_t>(m.data()[i]));
  });
  put_u32(out, crc_of(out.data(), out.size()));
  return out;
}

void save_checkpoint(const EncoderParams& params, const ModelConfig& config, std::ostream& out) {
  const std::string bytes = serialize_checkpoint(params, config);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

void save_checkpoint_file(const EncoderParams& params, const ModelConfig& config,
                          const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write checkpoint '" + path + "'");
  save_checkpoint(params, config, out);
}

Checkpoint deserialize_checkpoint(const std::string& bytes, const std::optional<ModelConfig>& expected) {
  if (bytes.size() < 8 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw CheckpointError(bytes.size() < 8 ? "checkpoint is truncated" : "bad checkpoint magic");
  }
  const std::size_t body = bytes.size() - 4;
  std::uint32_t stored_crc = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    stored_crc |= static_cast<std::uint32_t>(static_cast<std::uint8_t>(bytes[body + i])) << (8 * i);
  }
  if (crc_of(bytes.data(), body) != stored_crc) {
    throw CheckpointError("checkpoint checksum mismatch (truncated or corrupted)");
  }

  Reader r(bytes, body);
  r.str(4);
  const std::uint32_t doc_len = r.u32();
  Checkpoint ck;
  try {
    ck.config = ModelConfig::from_document(r.str(doc_len));
    ck.config.validate();
  } catch (const ConfigError& e) {
    throw CheckpointError(std::string("bad config document: ") + e.what());
  }
  if (expected && !same_architecture(ck.config, *expected)) {
    throw CheckpointError("checkpoint shape mismatch: stored config differs from the requested one");
  }

  const auto shapes = param_shapes(ck.config);
  const std::uint32_t count = r.u32();
  if (count != shapes.size()) throw CheckpointError("checkpoint shape mismatch: wrong tensor count");
  ck.params = zero_params(ck.config);
  std::size_t i = 0;
  ck.params.visit([&](const std::string& name, Matrix& m) {
    const std::string stored = r.str(r.u32());
    if (stored != name) throw CheckpointError("expected tensor '" + name + "', found '" + stored + "'");
    if (r.u8() != kDtypeF64) throw CheckpointError("unsupported dtype for '" + name + "'");
    const std::uint32_t rows = r.u32();
    const std::uint32_t cols = r.u32();
    if (rows != shapes[i].rows || cols != shapes[i].cols) {
      throw CheckpointError("checkpoint shape mismatch for '" + name + "'");
    }
    r.need(static_cast<std::size_t>(rows) * cols * 8);
    for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = std::bit_cast<double>(r.u64());
    ++i;
  });
  if (r.pos() != body) throw CheckpointError("trailing bytes after tensors");
  return ck;
}

Checkpoint load_checkpoint(std::istream& in, const std::optional<ModelConfig>& expected) {
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_checkpoint(bytes, expected);
}

Checkpoint load_checkpoint_file(const std::string& path, const std::optional<ModelConfig>& expected) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint '" + path + "'");
  return load_checkpoint(in, expected);
}

}  // namespace mpbert
