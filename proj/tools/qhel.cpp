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

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "qhel/common/errors.hpp"
#include "qhel/protocol/experiment.hpp"

namespace {

constexpr int kValidationExit = 2;
constexpr int kRuntimeExit = 1;

} // namespace

int main(int argc, char **argv) {
    using qhel::experiment::ExperimentConfig;
    using qhel::experiment::ExperimentKind;

    CLI::App app{"qhelearn: delegated and federated quantum learning over "
                 "homomorphically encrypted channels"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    std::uint64_t shots = 0;
    bool exact = false;

    app.add_option("--config", config_path, "JSON experiment config")
        ->check(CLI::ExistingFile);
    app.add_option("--seed", seed, "master seed (default 1)");
    app.add_option("--out", out_dir, "artifact directory (default .)")
        ->envname("QHEL_OUT");
    auto *shots_opt =
        app.add_option("--shots", shots, "shot budget per expectation value");
    app.add_flag("--exact", exact, "exact expectation values (default)")
        ->excludes(shots_opt);

    app.add_subcommand("demo-inference",
                       "classify random states over the encrypted channel")
        ->fallthrough();
    app.add_subcommand("train-delegated",
                       "gradient-descent training with delegated evaluations")
        ->fallthrough();
    app.add_subcommand("train-federated",
                       "scheduled multi-client training with optional DP")
        ->fallthrough();
    app.add_subcommand("dlp-kernel",
                       "delegated kernel estimation and ridge classification")
        ->fallthrough();
    app.add_subcommand("audit-privacy",
                       "pad mixedness audit plus server-view leak sweep")
        ->fallthrough();
    app.add_subcommand("compare-comm",
                       "communication bill vs the modeled blind baseline")
        ->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &err) {
        const int code = app.exit(err);
        return code == 0 ? 0 : kValidationExit;
    }

    ExperimentConfig config;
    try {
        if (!config_path.empty())
            config = ExperimentConfig::load(config_path);
        config.kind =
            qhel::experiment::parse_kind(app.get_subcommands().front()->get_name());
        if (app.count("--seed") > 0)
            config.seed = seed;
        if (app.count("--out") > 0)
            config.out_dir = out_dir;
        if (app.count("--shots") > 0)
            config.shots = shots;
        if (exact)
            config.shots = 0;
        config.validate();
    } catch (const qhel::Error &err) {
        std::cerr << "config error: " << err.what() << "\n";
        return kValidationExit;
    }

    try {
        const auto result = qhel::experiment::run_and_write(config);
        std::cout << result.summary.dump(2) << "\n";
        std::cerr << "artifacts: " << config.out_dir
                  << "/{metrics.csv, transcript.jsonl, summary.json}\n";
    } catch (const qhel::Error &err) {
        std::cerr << "error: " << err.what() << "\n";
        return kRuntimeExit;
    }
    return 0;
}
