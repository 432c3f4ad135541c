// Copyright 2026 The SwarmFuzz Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace swarmfuzz {

// A caller broke a documented precondition (shape mismatch, non-finite
// weights, wrong trace pairing, ...).
class ContractViolation : public std::logic_error {
 public:
  explicit ContractViolation(const std::string& what) : std::logic_error(what) {}
};

// normalize() was handed an all-zero vector.
class DegenerateInput : public std::invalid_argument {
 public:
  explicit DegenerateInput(const std::string& what)
      : std::invalid_argument(what) {}
};

// Invalid campaign configuration (unknown variant, out-of-range constant).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed test program text or binary.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// Checkpoint file failed magic, version, size or checksum validation.
class IntegrityError : public std::runtime_error {
 public:
  explicit IntegrityError(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace swarmfuzz
