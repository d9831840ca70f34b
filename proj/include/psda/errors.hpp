// psda/errors.hpp

// Copyright 2026 The PSDA Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef PSDA_ERRORS_HPP_
#define PSDA_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace psda {

/// Argument outside the mathematical domain of a function (negative or
/// non-finite concentration, ratio outside [0, 1), NaN input, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A mean resultant length so close to 1 that the concentration estimate
/// diverges. Carries the cap that was exceeded.
class CappedConcentrationError : public std::runtime_error {
 public:
  CappedConcentrationError(const std::string &what, double cap)
      : std::runtime_error(what), cap_(cap) {}
  double cap() const { return cap_; }

 private:
  double cap_;
};

/// Inconsistent or malformed data: dimension mismatch, bad normalization,
/// duplicate ids, parse failures, I/O failures.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public DataError {
 public:
  using DataError::DataError;
};

class ParseError : public DataError {
 public:
  using DataError::DataError;
};

class IoError : public DataError {
 public:
  using DataError::DataError;
};

/// Training set that cannot support estimation (too few speakers, ...).
class DegenerateDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace psda

#endif  // PSDA_ERRORS_HPP_
