// Copyright 2026 The QSF Authors
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
/**
 * @file
 * Exception types shared by all qsf modules.
 */
#pragma once

#include <stdexcept>
#include <string>

namespace qsf {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Shapes or sizes that do not fit together.
class DimensionError : public Error {
  public:
    using Error::Error;
};

/// A request exceeds a hard capacity (qubit count, matrix-mode cap).
class CapacityError : public Error {
  public:
    using Error::Error;
};

/// Malformed input file.
class ParseError : public Error {
  public:
    using Error::Error;
};

/// Invalid experiment or model configuration.
class ConfigError : public Error {
  public:
    using Error::Error;
};

/// Non-finite values encountered during training.
class NumericError : public Error {
  public:
    using Error::Error;
};

} // namespace qsf
