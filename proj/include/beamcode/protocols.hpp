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

#ifndef BEAMCODE_PROTOCOLS_HPP
#define BEAMCODE_PROTOCOLS_HPP

#include "beamcode/array_model.hpp"
#include "beamcode/beam_coding.hpp"
#include "beamcode/channel.hpp"
#include "beamcode/packets.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace beamcode
{

enum class Scheme
{
    exhaustive_pbp,
    multilevel_pbp,
    exhaustive_inpacket,
    feedback_inpacket,
    exhaustive_beamcoding,
    feedback_beamcoding,
};

std::string to_string(Scheme s);
// Accepts the enumerator names; throws std::invalid_argument otherwise.
Scheme parse_scheme(const std::string &name);
bool uses_beam_coding(Scheme s) noexcept;

/*!MD
# ProtocolConfig
Measurements are per-tap CE estimates normalized by `sqrt(N_tx * N_rx)`, so a pair of DFT beams
aligned with a unit ray reads 1. Each estimate carries complex Gaussian noise of variance
`N0 / (P_tx * N_tx * N_rx * 2L)`: the Golay correlator integrates `2L` chips and keeps the noise
white across lags. `noiseless` drops the noise but keeps `budget` for the data-phase SNR.

`realization` is applied to every weight vector either device programs: single beams, coded
fields, composites and sector beams.

Beam-coded training splits a codebook into `ceil(P / coding_group)` interleaved groups
(group g holds beams g, g + G, g + 2G, ...), each sent as its own run of coded fields. With the
default group size every DFT codebook of at most N beams is a single group.
MD!*/
struct ProtocolConfig
{
    ProtocolConfig(BeamCodebook tx, BeamCodebook rx, Scheme s = Scheme::exhaustive_pbp);

    BeamCodebook tx_codebook;
    BeamCodebook rx_codebook;
    Scheme scheme;
    LinkBudget budget;
    bool noiseless = true;
    WeightRealization realization;
    std::size_t num_sectors = 4;
    std::size_t coding_group = 0; // 0 means the Tx or Rx antenna count
    std::size_t feedback_bits = 512;
    double detection_factor = 5.0;
    unsigned ce_length_log2 = default_ce_length_log2;
    PacketSizes sizes;
    bool record_traces = false;

    // Throws std::invalid_argument for settings the selected scheme cannot use.
    void validate() const;
};

struct TrainingOutcome
{
    Scheme scheme = Scheme::exhaustive_pbp;
    bool detected = false;
    std::pair<std::size_t, std::size_t> best_pair{0, 0}; // 0-based (tx, rx)
    // One table per stage: exhaustive schemes give P x Q, feedback gives P x 1 then 1 x Q,
    // multi-level gives sectors then the beams inside the winning sectors.
    std::vector<CorrelationMatrix> correlations;
    std::size_t packets_sent = 0;
    std::size_t training_bits = 0;
    std::size_t feedback_bits = 0;
    std::vector<PowerTrace> power_traces;
    std::vector<std::string> warnings;
    double peak_statistic = 0.0; // largest decoded |r| over pairs and taps
    double noise_std = 0.0;      // std of one decoded entry
    double snr_linear = 0.0;     // data phase on the selected single beams; 0 when nothing was detected
    double snr_db = 0.0;
};

// Data-phase SNR of a pair of programmed weights: P_tx * sum_d |h_d|^2 / N0.
double link_snr(const LinkBudget &budget, const ChannelResponse &ch, const WeightVector &tx_w, const WeightVector &rx_w);

// sum_d |h_d|^2 for codebook beams p and q after `realization`, normalized by N_tx * N_rx.
double pair_gain(const ProtocolConfig &cfg, const ChannelResponse &ch, std::size_t p, std::size_t q);

// Unit-norm beam on the first N / sectors elements, steered at the mean cos of the sector's beams.
// Sector s holds the contiguous beams [s P / S, (s + 1) P / S).
std::vector<WeightVector> sector_beams(const BeamCodebook &codebook, std::size_t sectors);

// Interleaved coding groups of at most group_size beams.
std::vector<std::vector<std::size_t>> coding_groups(std::size_t num_beams, std::size_t group_size);

TrainingOutcome run_exhaustive_pbp(const ProtocolConfig &cfg, const ChannelRealization &ch, std::uint64_t seed);
TrainingOutcome run_multilevel_pbp(const ProtocolConfig &cfg, const ChannelRealization &ch, std::uint64_t seed);
TrainingOutcome run_exhaustive_inpacket(const ProtocolConfig &cfg, const ChannelRealization &ch, std::uint64_t seed);
TrainingOutcome run_feedback_inpacket(const ProtocolConfig &cfg, const ChannelRealization &ch, std::uint64_t seed);
TrainingOutcome run_exhaustive_beamcoding(const ProtocolConfig &cfg, const ChannelRealization &ch, std::uint64_t seed);
TrainingOutcome run_feedback_beamcoding(const ProtocolConfig &cfg, const ChannelRealization &ch, std::uint64_t seed);

// Dispatch on cfg.scheme.
TrainingOutcome run_training(const ProtocolConfig &cfg, const ChannelRealization &ch, std::uint64_t seed);

} // namespace beamcode

#endif
