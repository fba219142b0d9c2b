// Copyright 2026 The Lactose Authors.
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

namespace lactose {

// Base of every error the library throws. Callers that only need a one-line
// diagnostic can catch this and print what().
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Width or layout disagreement between two values that must match.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// NaN/Inf where finite values are required.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Routing value could not be mapped to a branch.
class RoutingError : public Error {
 public:
  using Error::Error;
};

// Rejected user-supplied configuration or data.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A trace or bank was used with a model it was not produced for.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

// Branch index outside the bank.
class IndexError : public Error {
 public:
  using Error::Error;
};

// Malformed, truncated or unsupported file content.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace lactose
