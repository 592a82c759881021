/*
 * Copyright 2026 The GradLens Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef GRADLENS_ERROR_H_
#define GRADLENS_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace gradlens {

// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller broke a documented precondition (dimension mismatch, empty input,
// out-of-range index).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

// A precondition about the *data* rather than the call shape, e.g. the
// unique-label assumption of the linear-model attack.
class PreconditionError : public ContractViolation {
 public:
  using ContractViolation::ContractViolation;
};

// A non-finite value appeared in a named tensor.
class NumericError : public Error {
 public:
  NumericError(std::string tensor, const std::string& what)
      : Error(what + " (tensor: " + tensor + ")"), tensor_(std::move(tensor)) {}

  const std::string& tensor() const { return tensor_; }

 private:
  std::string tensor_;
};

// Invalid configuration: unknown suite names, degenerate calibration data,
// out-of-range experiment parameters.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed input text or bytes. `location` is a byte offset for binary
// formats and a 1-based line number for line-oriented formats.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t location)
      : Error(what), location_(location) {}

  std::size_t location() const { return location_; }

 private:
  std::size_t location_;
};

// Gradient inversion was requested for a neuron whose bias gradient is too
// small to divide by (dead neuron, or activating samples cancel out).
class NonInvertible : public Error {
 public:
  using Error::Error;
};

}  // namespace gradlens

#endif  // GRADLENS_ERROR_H_
