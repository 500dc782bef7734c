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

/**
 * @file
 * Append-only log of everything server-side code observes, plus the audit
 * that scans it against the true secrets after the fact.
 *
 * The audit is an information-flow check: with the plaintext pads and
 * samples in hand (test side only), it searches every logged payload for
 * their canonical renders and, for registers of 16 bits or more, their raw
 * bit strings. Short raw patterns are skipped since they collide with
 * ordinary log content by chance.
 */

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

#include "qhel/common/bits.hpp"
#include "qhel/crypto/pad.hpp"

namespace qhel::engine {

/// Append-only JSON-lines record of the server's view of a session.
class ServerViewLog {
  public:
    void record(const std::string &kind, nlohmann::json payload);

    const std::vector<std::string> &lines() const { return lines_; }
    std::size_t size() const { return lines_.size(); }
    std::string to_jsonl() const;

  private:
    std::vector<std::string> lines_;
};

/// Canonical debug render of a pad key; the audit always scans for this.
std::string pad_needle(const crypto::PadKey &key);

/// Canonical debug render of a plaintext sample encoding.
std::string sample_needle(const common::Bits &bits);

/// Test-side plaintext secrets handed to the audit.
struct ServerSecrets {
    std::vector<crypto::PadKey> pads;
    std::vector<common::Bits> samples;
};

struct AuditReport {
    bool pass = true;
    std::vector<std::string> findings;
};

/// Scans every log line for renders or long raw encodings of the secrets.
AuditReport audit_server_view(const ServerViewLog &log, const ServerSecrets &secrets);

} // namespace qhel::engine
