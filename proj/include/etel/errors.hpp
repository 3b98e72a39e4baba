// Copyright 2026 The etel Authors
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

#include <stdexcept>
#include <string>

namespace etel {

// Root of every error raised by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A value outside the domain an operation is defined on (e.g. a plaintext
// that is not a subgroup member).
class DomainError : public Error {
 public:
  using Error::Error;
};

// A real value that cannot be represented by the codec or would overflow
// the product budget.
class RangeError : public Error {
 public:
  using Error::Error;
};

class MalformedCiphertext : public Error {
 public:
  using Error::Error;
};

class GenerationError : public Error {
 public:
  using Error::Error;
};

// Bad scenario / key / gain configuration detected before a run starts.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Wire-format decoding failure. `offset` is the byte position at which the
// problem was detected.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " (offset " + std::to_string(offset) + ")"), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

class TransportError : public Error {
 public:
  using Error::Error;
};

}  // namespace etel
