// convbss/error.h

// Copyright 2026 The convbss Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CONVBSS_ERROR_H_
#define CONVBSS_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace convbss {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not agree (channel counts, vector lengths, ...).
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Not enough samples or frames for the requested estimate.
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values, failed decompositions.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Argument outside its documented domain.
class InvalidArgumentError : public Error {
 public:
  using Error::Error;
};

/// A candidate direction was fully absorbed by the constraint subspace.
class DegenerateDirectionError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// A separating row could not be extracted after the allowed restarts.
class ExtractionFailure : public Error {
 public:
  ExtractionFailure(std::size_t row, const std::string &what)
      : Error("extraction of row " + std::to_string(row) + " failed: " + what),
        row_(row) {}
  std::size_t row() const { return row_; }

 private:
  std::size_t row_;
};

}  // namespace convbss

#endif  // CONVBSS_ERROR_H_
