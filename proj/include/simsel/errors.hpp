// Copyright 2026 The Authors.
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

namespace simsel {

// Error taxonomy used across the library:
//   config_error  - caller supplied an invalid parameter or option
//   data_error    - input data is malformed or out of bounds
//   numeric_error - a numerical routine failed (e.g. non-PD factorization)
//   io_error      - file could not be read or written
// Programmer misuse (committing a duplicate element) throws std::logic_error.

class config_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class data_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class numeric_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class io_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace simsel
