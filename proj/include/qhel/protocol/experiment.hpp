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
 * @file experiment.hpp
 * Config-driven experiment runner behind the command-line tool.
 *
 * Every experiment is one JSON document: a kind, a master seed, a shot
 * budget, and a kind-specific settings block. Running it yields three
 * artifacts: metrics.csv, transcript.jsonl, and summary.json. Outputs are
 * a pure function of the config, so the same seed reproduces every byte.
 */

#ifndef QHEL_PROTOCOL_EXPERIMENT_HPP
#define QHEL_PROTOCOL_EXPERIMENT_HPP

#include <cstdint>
#include <string>

#include <json.hpp>

namespace qhel::experiment {

inline constexpr const char *kVersion = "0.1.0";

enum class ExperimentKind {
    DemoInference,
    TrainDelegated,
    TrainFederated,
    DlpKernel,
    AuditPrivacy,
    CompareComm,
};

/// Hyphenated name used in configs and as the CLI subcommand.
std::string kind_name(ExperimentKind kind);

/// Inverse of kind_name; unknown names throw ConfigError("kind", ...).
ExperimentKind parse_kind(const std::string &name);

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::DemoInference;
    std::uint64_t seed = 1;
    std::uint64_t shots = 0; // 0 = exact expectation values
    std::string out_dir = ".";
    nlohmann::json settings = nlohmann::json::object();

    /// Parses and fully validates a top-level config document. Every
    /// schema violation names the offending field path.
    static ExperimentConfig from_json(const nlohmann::json &doc);

    /// from_json over the parsed contents of `path`.
    static ExperimentConfig load(const std::string &path);

    /// Canonical document with every settings default filled in.
    nlohmann::json to_json() const;

    /// Re-checks kind-specific settings (ranges, primality, sizes).
    void validate() const;
};

/// FNV-1a over the canonical config dump; embedded in every summary.
std::uint64_t config_hash(const ExperimentConfig &config);

struct ExperimentResult {
    nlohmann::json summary;
    std::string metrics_csv;      // header + rows
    std::string transcript_jsonl; // one protocol message per line
};

/// Executes the configured experiment in memory.
ExperimentResult run_experiment(const ExperimentConfig &config);

/// run_experiment plus metrics.csv / transcript.jsonl / summary.json
/// written under config.out_dir (created if missing).
ExperimentResult run_and_write(const ExperimentConfig &config);

} // namespace qhel::experiment

#endif // QHEL_PROTOCOL_EXPERIMENT_HPP
