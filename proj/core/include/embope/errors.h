// Copyright 2026 The embope Authors
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

#ifndef EMBOPE_ERRORS_H_
#define EMBOPE_ERRORS_H_

#include <stdexcept>
#include <string>

namespace embope {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid argument or configuration (out-of-range epsilon, shape mismatch,
// non-finite input, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Input is well-formed but the quantity is undefined on it (all-zero SNIPS
// weights, zero logging mass on an observed embedding, zero IPS error, ...).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

class TrainingDivergenceError : public Error {
 public:
  TrainingDivergenceError(int epoch, const std::string& what)
      : Error(what), epoch_(epoch) {}
  int epoch() const { return epoch_; }

 private:
  int epoch_;
};

// Logged-data CSV validation failure. `row` is the 1-based data row (header
// excluded); 0 when the problem is with the header itself.
class LoadError : public Error {
 public:
  LoadError(long row, std::string column, const std::string& what)
      : Error(what), row_(row), column_(std::move(column)) {}
  long row() const { return row_; }
  const std::string& column() const { return column_; }

 private:
  long row_;
  std::string column_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace embope

#endif  // EMBOPE_ERRORS_H_
