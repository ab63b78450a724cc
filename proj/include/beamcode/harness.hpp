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

#ifndef BEAMCODE_HARNESS_HPP
#define BEAMCODE_HARNESS_HPP

#include "beamcode/channel.hpp"
#include "beamcode/protocols.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace beamcode
{

struct PatternConfig
{
    std::size_t antennas = 16;
    std::size_t beams = 1;  // coded DFT beams, contiguous around broadside
    std::size_t field = 0;  // which coded field to plot
    std::optional<int> bits; // phase quantization
    bool uniform = false;    // phase-only projection
    double step_deg = 0.1;

    friend bool operator==(const PatternConfig &, const PatternConfig &) = default;
};

/*!MD
# ExperimentConfig
Flat `key = value` text, one entry per line, `#` starts a comment. Keys use dotted sections:

    experiment = power_var
    runs = 1000
    seed = 1
    array.tx_antennas = 16
    channel.cluster_loss_mean_db = -10
    quant.bits = 1, 2, 3, 4, inf

`serialize` writes every key in a fixed order, so parse -> serialize -> parse is the identity.
Unknown keys and malformed values raise `config_error`.
MD!*/
struct ExperimentConfig
{
    std::string experiment = "default";
    std::vector<Scheme> schemes{Scheme::exhaustive_pbp, Scheme::exhaustive_beamcoding};
    std::size_t tx_antennas = 16;
    std::size_t rx_antennas = 16;
    std::size_t power_var_rx_antennas = 1;
    double spacing = 0.5;
    std::vector<std::size_t> beams_per_packet{1, 2, 4, 8, 16};
    std::vector<bool> environments{true, false}; // true = LOS
    ChannelConfig channel;
    LinkBudget budget;
    bool noiseless = true;
    std::vector<std::optional<int>> quant_bits{1, 2, 3, 4, std::nullopt};
    bool uniform_weighting = false;
    std::size_t num_sectors = 4;
    std::size_t feedback_bits = 512;
    std::size_t runs = 1000;
    std::uint64_t seed = 1;
    std::string output = "out";
    std::size_t threads = 0; // 0 = hardware concurrency
    PatternConfig pattern;

    // Throws config_error.
    void validate() const;

    friend bool operator==(const ExperimentConfig &, const ExperimentConfig &) = default;
};

ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path &path);
std::string serialize(const ExperimentConfig &cfg);

// Header plus rows, written as comma-separated text with '\n' line ends.
struct CsvTable
{
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::string str() const;
    void write(const std::filesystem::path &path) const;
};

// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

// Runs job(i) for i in [0, count) on `threads` workers; results land at index i.
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)> &job);

struct GammaRecord
{
    std::string cell; // e.g. power-var/nlos/beam_coding/K16
    std::uint64_t seed = 0;
    std::size_t field = 0; // group * T + t
    double gamma = 0.0;
};

struct PowerVarCell
{
    std::string id;
    bool los = false;
    LayoutScheme scheme = LayoutScheme::ieee80211ad;
    std::size_t beams = 0;
    std::vector<GammaRecord> records; // sorted by (seed, field)

    std::vector<double> gammas() const;
};

// gamma per TRN field for one channel: Tx codebook split into interleaved groups of `beams`,
// one packet per group, Rx on the fixed single-antenna or broadside weights `rx_w`.
std::vector<double> packet_gammas(const BeamCodebook &tx, std::size_t beams, LayoutScheme scheme,
                                  const ChannelResponse &ch, const WeightVector &rx_w);

std::vector<PowerVarCell> power_var_campaign(const ExperimentConfig &cfg);

struct QuantPoint
{
    bool los = false;
    std::optional<int> bits;
    Scheme scheme = Scheme::exhaustive_pbp;
    std::vector<double> snr_linear; // per run, in run order
    std::vector<std::uint64_t> seeds;
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    double aggregate_snr_db = 0.0;
};

// For each environment and bit width: N-BF (exhaustive PbP) and exhaustive beam coding.
std::vector<QuantPoint> quant_sweep_campaign(const ExperimentConfig &cfg);

struct OverheadRow
{
    std::size_t beams = 0;
    std::size_t bits_80211ad = 0;
    std::size_t bits_beam_coding = 0;
};

std::vector<OverheadRow> overhead_table(const ExperimentConfig &cfg);

// Weights selected by a PatternConfig: a single beam, or one field of a coded schedule.
WeightVector pattern_weights(const PatternConfig &pc, double spacing);

// Output files of a command, keyed by file name.
using OutputSet = std::map<std::string, std::string>;

OutputSet cmd_pattern(const ExperimentConfig &cfg);
OutputSet cmd_power_var(const ExperimentConfig &cfg);
OutputSet cmd_quant_sweep(const ExperimentConfig &cfg);
OutputSet cmd_overhead(const ExperimentConfig &cfg);
// Single debug run on a sampled channel (channel.los) per configured scheme, as JSON.
OutputSet cmd_train(const ExperimentConfig &cfg);

void write_outputs(const OutputSet &files, const std::filesystem::path &dir);

} // namespace beamcode

#endif
