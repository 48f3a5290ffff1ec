// Copyright 2026 The Peephole Authors. All Rights Reserved.
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

#ifndef PEEPHOLE_ERRORS_HPP_
#define PEEPHOLE_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace peephole {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or out-of-domain input: bad layer specs, codes, files, schemas.
class DataError : public Error {
 public:
  using Error::Error;
};

/// A metric is undefined for the given input (e.g. all values tied).
class MetricError : public DataError {
 public:
  using DataError::DataError;
};

/// Tensor shapes that do not line up.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Non-finite losses, failed gradient checks and similar numeric breakdowns.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace peephole

#endif  // PEEPHOLE_ERRORS_HPP_
