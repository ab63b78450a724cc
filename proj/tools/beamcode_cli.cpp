// SPDX-License-Identifier: Apache-2.0
//
// beamcode: beam-coded in-packet beamforming training for mmWave phased arrays
// Copyright (C) 2026 The beamcode authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------
//
// Command line front end: beamcode <pattern|power-var|quant-sweep|overhead|train> [options]
// Log verbosity: BEAMCODE_LOG=trace|debug|info|warn|error|off (default warn).

#include "beamcode/errors.hpp"
#include "beamcode/harness.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <functional>
#include <iostream>
#include <optional>
#include <string>

namespace
{
constexpr int exit_config_error = 2;

struct CommonOptions
{
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::size_t> runs;
    std::optional<std::size_t> threads;
};

struct PatternOptions
{
    std::optional<std::size_t> antennas;
    std::optional<std::size_t> beams;
    std::optional<std::size_t> field;
    std::optional<std::string> bits;
    bool uniform = false;
};

void add_common(CLI::App *sub, CommonOptions &o)
{
    sub->add_option("--config", o.config, "Experiment config file (key = value)");
    sub->add_option("--seed", o.seed, "Master seed");
    sub->add_option("--out", o.out, "Output directory");
    sub->add_option("--runs", o.runs, "Monte-Carlo runs per cell");
    sub->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
}

void setup_logging()
{
    auto logger = spdlog::stderr_color_mt("beamcode");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::warn);
    if (const char *lvl = std::getenv("BEAMCODE_LOG"))
        spdlog::set_level(spdlog::level::from_str(lvl));
}
} // namespace

int main(int argc, char **argv)
{
    setup_logging();

    CLI::App app{"Beam-coded in-packet beamforming training simulator"};
    app.require_subcommand(1);

    CommonOptions common;
    PatternOptions pat;

    auto *pattern = app.add_subcommand("pattern", "Array pattern of a single or beam-coded weight vector");
    add_common(pattern, common);
    pattern->add_option("--antennas", pat.antennas, "Number of antennas");
    pattern->add_option("--beams", pat.beams, "Number of coded beams (1 = single beam)");
    pattern->add_option("--field", pat.field, "Coded field index (0-based)");
    pattern->add_option("--bits", pat.bits, "Phase quantization bits or inf");
    pattern->add_flag("--uniform", pat.uniform, "Phase-only (uniform magnitude) projection");

    auto *power_var = app.add_subcommand("power-var", "Power ratio statistics of 802.11ad vs beam coding");
    add_common(power_var, common);
    auto *quant = app.add_subcommand("quant-sweep", "Aggregate SNR vs phase quantization bits");
    add_common(quant, common);
    auto *overhead = app.add_subcommand("overhead", "Training bits per beam for both packet layouts");
    add_common(overhead, common);
    auto *train = app.add_subcommand("train", "Single training run with full trace dump");
    add_common(train, common);

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError &e)
    {
        app.exit(e);
        return exit_config_error;
    }

    using namespace beamcode;
    try
    {
        ExperimentConfig cfg;
        if (!common.config.empty())
            cfg = load_config(common.config);
        if (common.seed)
            cfg.seed = *common.seed;
        if (common.out)
            cfg.output = *common.out;
        if (common.runs)
            cfg.runs = *common.runs;
        if (common.threads)
            cfg.threads = *common.threads;
        if (pat.antennas)
            cfg.pattern.antennas = *pat.antennas;
        if (pat.beams)
            cfg.pattern.beams = *pat.beams;
        if (pat.field)
            cfg.pattern.field = *pat.field;
        if (pat.bits)
            cfg.pattern.bits = parse_config("pattern.bits = " + *pat.bits).pattern.bits;
        if (pat.uniform)
            cfg.pattern.uniform = true;
        cfg.validate();

        std::function<OutputSet(const ExperimentConfig &)> cmd;
        if (app.got_subcommand(pattern))
            cmd = cmd_pattern;
        else if (app.got_subcommand(power_var))
            cmd = cmd_power_var;
        else if (app.got_subcommand(quant))
            cmd = cmd_quant_sweep;
        else if (app.got_subcommand(overhead))
            cmd = cmd_overhead;
        else
            cmd = cmd_train;

        spdlog::info("running with seed {} and {} runs", cfg.seed, cfg.runs);
        auto files = cmd(cfg);
        files["config.cfg"] = serialize(cfg);
        write_outputs(files, cfg.output);
        for (const auto &[name, content] : files)
            std::cout << (std::filesystem::path(cfg.output) / name).string() << "\n";
        return 0;
    }
    catch (const config_error &e)
    {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config_error;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
