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

#ifndef BEAMCODE_PACKETS_HPP
#define BEAMCODE_PACKETS_HPP

#include "beamcode/array_model.hpp"
#include "beamcode/beam_coding.hpp"
#include "beamcode/channel.hpp"

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace beamcode
{

enum class LayoutScheme
{
    ieee80211ad,
    beam_coding,
};

std::string to_string(LayoutScheme s);

struct TrnField
{
    std::size_t ce_bits = 1024;
    std::size_t delay_subfield_bits = 0;
    std::size_t weight_index = 0; // into TrainingWeights::trn
    std::string weight_label;
};

struct PacketSizes
{
    std::size_t preamble_bits = 2176;
    std::size_t header_bits = 1024;
    std::size_t agc_subfield_bits = 320;
    std::size_t agc_subfields_per_beam = 4;
    std::size_t delay_subfield_bits = 640;
    std::size_t delay_subfields_per_field = 4;
    std::size_t ce_bits = 1024;
};

/*!MD
# PacketLayout
Field-level view of a training packet: preamble, header, AGC subfields, TRN fields, in that order.

| scheme       | AGC subfields | TRN fields        | bits per TRN field |
|--------------|---------------|-------------------|--------------------|
| 802.11ad     | 4 per beam    | K                 | 4 x 640 + 1024     |
| beam coding  | none          | next_pow2(K)      | 1024               |

With the default sizes one 802.11ad beam costs 4 x 320 + 4 x 640 + 1024 = 4864 training bits and
one beam-coded field costs 1024.
MD!*/
struct PacketLayout
{
    LayoutScheme scheme = LayoutScheme::ieee80211ad;
    std::size_t num_beams = 0;
    std::size_t preamble_bits = 0;
    std::size_t header_bits = 0;
    std::size_t agc_subfields = 0;
    std::size_t agc_subfield_bits = 0;
    std::vector<TrnField> trn_fields;

    std::size_t agc_bits() const noexcept { return agc_subfields * agc_subfield_bits; }
    std::size_t trn_bits() const noexcept;
    std::size_t training_bits() const noexcept { return agc_bits() + trn_bits(); }
    std::size_t total_bits() const noexcept { return preamble_bits + header_bits + training_bits(); }
};

PacketLayout layout_80211ad(std::size_t num_beams, const PacketSizes &sizes = {});

// Throws capacity_error when num_beams exceeds orthogonal_capacity.
PacketLayout layout_beam_coding(std::size_t num_beams,
                                std::size_t orthogonal_capacity = std::numeric_limits<std::size_t>::max(),
                                const PacketSizes &sizes = {});

// Training bits spent per trained beam on the K = 1 layout.
std::size_t per_beam_bits(LayoutScheme scheme, const PacketSizes &sizes = {});

// {"scheme", "num_beams", "total_bits", "training_bits", "sections": [{"name", "bits", "weight"}]}
nlohmann::json to_json(const PacketLayout &layout);

// Weights transmitted during a packet. The preamble is split into equal segments, one per entry
// of `preamble`, so a single entry means a static preamble beam.
struct TrainingWeights
{
    std::vector<WeightVector> preamble;
    std::vector<WeightVector> trn;
};

// Preamble on the unit-norm equal-power composite of the trained beams; TRN field k on beam k.
TrainingWeights weights_80211ad(const BeamCodebook &beams);
TrainingWeights weights_80211ad(std::span<const WeightVector> beams);

// Preamble cycles through the coded field weights; TRN field t on field weight t.
TrainingWeights weights_beam_coding(const CodedWeightSchedule &schedule);
TrainingWeights weights_beam_coding(std::vector<WeightVector> fields);

struct PowerTrace
{
    double preamble_power = 0.0;
    double agc_gain = 0.0; // 1 / preamble_power, fixed for the whole packet; 0 if the preamble is silent
    std::vector<double> trn_power;
};

// Mean received power per TRN field, sum_d |h_d|^2, which is exact for Golay CE fields.
PowerTrace power_trace(const PacketLayout &layout, const TrainingWeights &weights, const ChannelResponse &ch,
                       const WeightVector &rx_w);

// Preamble waveform: Golay a-sequence of length 128 repeated to preamble_bits chips.
std::vector<cplx> preamble_chips(std::size_t preamble_bits = 2176);

// Received preamble samples through the tap-delay channel, with the transmit weights switching
// between preamble segments.
std::vector<cplx> preamble_samples(const TrainingWeights &weights, const ChannelResponse &ch, const WeightVector &rx_w,
                                   std::size_t preamble_bits = 2176);

} // namespace beamcode

#endif
