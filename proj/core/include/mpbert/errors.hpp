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
#include <stdexcept>
#include <string>

namespace mpbert {

/// Base class of every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input data: malformed files, unknown symbols, sequences that do not fit.
/// The CLI maps these to exit status 3.
class DataError : public Error {
 public:
  using Error::Error;
};

class EmptySentence : public DataError {
 public:
  EmptySentence() : DataError("sentence is empty after normalization") {}
};

class ParseError : public DataError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class UnknownPhoneme : public DataError {
 public:
  explicit UnknownPhoneme(const std::string& symbol)
      : DataError("unknown phoneme symbol '" + symbol + "'"), symbol_(symbol) {}

  const std::string& symbol() const { return symbol_; }

 private:
  std::string symbol_;
};

class UnknownToken : public DataError {
 public:
  using DataError::DataError;
};

class SequenceTooLong : public DataError {
 public:
  SequenceTooLong(std::size_t length, std::size_t max_len)
      : DataError("sequence of " + std::to_string(length) +
                  " positions exceeds max_len " + std::to_string(max_len)) {}
};

class IndexError : public DataError {
 public:
  using DataError::DataError;
};

class EmptyInput : public DataError {
 public:
  using DataError::DataError;
};

class CheckpointError : public DataError {
 public:
  using DataError::DataError;
};

/// Invalid hyperparameters or presets.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Non-finite activations or losses. The CLI maps these to exit status 4.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, long where = -1)
      : Error(what), where_(where) {}

  /// Layer index for encoder failures, step index for training divergence, -1 otherwise.
  long where() const { return where_; }

 private:
  long where_;
};

}  // namespace mpbert
