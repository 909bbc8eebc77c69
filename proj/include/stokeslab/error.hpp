// Copyright 2026 The stokeslab Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace stokeslab {

/// Base class for every error raised by the library. `kind()` is a short
/// machine-readable tag used by the CLI error line.
class Error : public std::runtime_error {
  public:
    Error(std::string kind, const std::string &what) : std::runtime_error(what), kind_(std::move(kind)) {}
    const std::string &kind() const noexcept { return kind_; }

  private:
    std::string kind_;
};

class InvalidArgument : public Error {
  public:
    explicit InvalidArgument(const std::string &what) : Error("invalid-argument", what) {}
};

/// A quantity is mathematically undefined for the given input (e.g. a ratio
/// whose denominator is the probability of a non-vacuum event that is zero).
class UndefinedResult : public Error {
  public:
    explicit UndefinedResult(const std::string &what) : Error("undefined-result", what) {}
};

class TruncationError : public Error {
  public:
    TruncationError(const std::string &what, int required_n_max)
        : Error("truncation", what), required_n_max_(required_n_max) {}
    int required_n_max() const noexcept { return required_n_max_; }

  private:
    int required_n_max_;
};

class BracketingError : public Error {
  public:
    BracketingError(const std::string &what, double f_lo, double f_hi)
        : Error("bracketing", what), f_lo_(f_lo), f_hi_(f_hi) {}
    double f_lo() const noexcept { return f_lo_; }
    double f_hi() const noexcept { return f_hi_; }

  private:
    double f_lo_;
    double f_hi_;
};

class ParseError : public Error {
  public:
    ParseError(const std::string &what, int line) : Error("parse", what), line_(line) {}
    int line() const noexcept { return line_; }

  private:
    int line_;
};

}  // namespace stokeslab
