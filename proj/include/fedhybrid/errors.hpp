// Copyright 2026 The FedHybrid Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FEDHYBRID_ERRORS_HPP_
#define FEDHYBRID_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace fedhybrid {

// Violated precondition or broken invariant (dimension mismatch, empty
// input, out-of-range argument).
class ContractError : public std::logic_error {
 public:
  explicit ContractError(const std::string& what) : std::logic_error(what) {}
};

// Invalid scheme parameters (non-power-of-two ring degree, no NTT-compatible
// prime of the requested size, modulus too small).
class ParameterError : public std::invalid_argument {
 public:
  explicit ParameterError(const std::string& what)
      : std::invalid_argument(what) {}
};

// Homomorphic addition budget exhausted.
class NoiseBudgetError : public std::runtime_error {
 public:
  explicit NoiseBudgetError(const std::string& what)
      : std::runtime_error(what) {}
};

// Encoded value does not fit the coefficient-modulus headroom.
class EncodingError : public std::runtime_error {
 public:
  explicit EncodingError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed configuration file or flag value; the message names the field.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Serialization or file I/O failure.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// A numerical routine failed to converge; indicates a broken building block
// rather than bad user input.
class InternalError : public std::logic_error {
 public:
  explicit InternalError(const std::string& what) : std::logic_error(what) {}
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ContractError(message);
}

inline void require_param(bool condition, const std::string& message) {
  if (!condition) throw ParameterError(message);
}

}  // namespace fedhybrid

#endif  // FEDHYBRID_ERRORS_HPP_
