// Copyright 2026 The qmem Authors
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

namespace qmem {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Qubit budget or device size exceeded.
class ResourceError : public Error {
 public:
  using Error::Error;
};

class AddressError : public Error {
 public:
  using Error::Error;
};

/// Store to an occupied cell under the `error` policy.
class PolicyError : public Error {
 public:
  using Error::Error;
};

class PostSelectionError : public Error {
 public:
  PostSelectionError(const std::string& what, double probability)
      : Error(what), probability_(probability) {}
  double probability() const noexcept { return probability_; }

 private:
  double probability_;
};

/// Operation requires state that has not been set up (e.g. QRAM without data).
class StateError : public Error {
 public:
  using Error::Error;
};

class ConfigurationError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace qmem
