/* Copyright 2026 The polyglot-ctc Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef PCTC_ERROR_HPP_
#define PCTC_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace pctc {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad user input: malformed config, invalid option values, contract
// violations detectable before any work starts. CLI exit code 2.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

// Filesystem / format problems while reading or writing. CLI exit code 1.
class IoError : public Error {
 public:
  explicit IoError(const std::string& msg) : Error(msg) {}
};

// Training produced a non-finite loss or gradient. CLI exit code 3.
class DivergenceError : public Error {
 public:
  explicit DivergenceError(const std::string& msg) : Error(msg) {}
};

// The (T, z) pair admits no CTC alignment. The trainer catches this to
// count and skip such utterances instead of poisoning loss averages.
class InfeasibleError : public Error {
 public:
  explicit InfeasibleError(const std::string& msg) : Error(msg) {}
};

}  // namespace pctc

#endif  // PCTC_ERROR_HPP_
