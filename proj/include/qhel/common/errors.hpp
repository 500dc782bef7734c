// Copyright 2026 The qhelearn Authors.
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

namespace qhel {

/// Base class for all qhelearn errors.
class Error : public std::runtime_error {
  public:
    explicit Error(const std::string &msg) : std::runtime_error(msg) {}
};

/// Precondition violation on an argument value (bad index, bad range, ...).
class DomainError : public Error {
  public:
    explicit DomainError(const std::string &msg) : Error(msg) {}
};

/// Structural validation failure (non-bijective permutation, bad schema, ...).
class ValidationError : public Error {
  public:
    explicit ValidationError(const std::string &msg) : Error(msg) {}
};

/// Gate kind not handled by the requested code path.
class UnsupportedGateError : public Error {
  public:
    explicit UnsupportedGateError(const std::string &msg) : Error(msg) {}
};

/// Ciphertext presented to a vault it was not created under.
class WrongKeyError : public Error {
  public:
    explicit WrongKeyError(const std::string &msg) : Error(msg) {}
};

/// Message-flow violation (grammar break, mismatched pads, extra rounds).
class ProtocolError : public Error {
  public:
    explicit ProtocolError(const std::string &msg) : Error(msg) {}
};

/// Transcript bookkeeping inconsistency.
class TranscriptError : public Error {
  public:
    explicit TranscriptError(const std::string &msg) : Error(msg) {}
};

/// Request exceeds the desk-scale resource caps.
class ResourceError : public Error {
  public:
    explicit ResourceError(const std::string &msg) : Error(msg) {}
};

/// Experiment configuration rejected; `field` is the offending path.
class ConfigError : public Error {
  public:
    ConfigError(const std::string &field, const std::string &msg)
        : Error(field + ": " + msg), field_(field) {}
    const std::string &field() const { return field_; }

  private:
    std::string field_;
};

/// Linear solve failed or is numerically degenerate.
class SolverError : public Error {
  public:
    explicit SolverError(const std::string &msg) : Error(msg) {}
};

} // namespace qhel
