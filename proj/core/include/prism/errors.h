// Copyright 2026 The PRISM Authors
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

#ifndef PRISM_ERRORS_H_
#define PRISM_ERRORS_H_

#include <stdexcept>
#include <string>

namespace prism {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dimensions of two operands disagree, or a dimension is zero.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A scalar parameter or identifier is outside its allowed range.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// An operation was invoked on an object in the wrong state.
class StateError : public Error {
 public:
  using Error::Error;
};

/// A file or text payload could not be parsed.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace prism

#endif  // PRISM_ERRORS_H_
