// Copyright 2026 The dpcdr Authors
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

#ifndef DPCDR_ERROR_H_
#define DPCDR_ERROR_H_

#include <stdexcept>
#include <string>

namespace dpcdr {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A parameter or value lies outside the domain an operation accepts.
class DomainError : public Error {
 public:
  using Error::Error;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

// Matrix or vector dimensions do not line up.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// A numerical routine failed (non-convergence, singular factorization).
class NumericError : public Error {
 public:
  using Error::Error;
};

// Input that makes a quantity undefined, e.g. an all-zero rating row fed to
// a cosine prediction.
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

// Training produced a non-finite loss.
class DivergenceError : public NumericError {
 public:
  DivergenceError(int epoch, const std::string& what)
      : NumericError("diverged at epoch " + std::to_string(epoch) + ": " + what),
        epoch_(epoch) {}
  int epoch() const { return epoch_; }

 private:
  int epoch_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed input file; the message names the file and line.
class ParseError : public IoError {
 public:
  ParseError(const std::string& file, long line, const std::string& what)
      : IoError(file + ":" + std::to_string(line) + ": " + what) {}
};

}  // namespace dpcdr

#endif  // DPCDR_ERROR_H_
