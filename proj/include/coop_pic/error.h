// Copyright 2026 The coop_pic Authors
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

#ifndef COOP_PIC_ERROR_H_
#define COOP_PIC_ERROR_H_

#include <stdexcept>
#include <string>

namespace coop_pic {

// base class for every error raised by the library
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// agent index outside [0, N)
class IndexError : public Error {
 public:
  using Error::Error;
};

// inconsistent vector / matrix sizes
class DimensionError : public Error {
 public:
  using Error::Error;
};

// forward integration produced a non-finite state
class IntegrationError : public Error {
 public:
  using Error::Error;
};

// rollout scoring failed (non-PD weight matrix, NaN path value, ...)
class ScoringError : public Error {
 public:
  using Error::Error;
};

// configuration rejected; `field` is the dotted path of the offending entry
class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& message)
      : Error(field.empty() ? message : field + ": " + message),
        field_(std::move(field)) {}

  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

// scenario text could not be parsed
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace coop_pic

#endif  // COOP_PIC_ERROR_H_
