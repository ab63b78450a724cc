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

#ifndef BEAMCODE_CHANNEL_HPP
#define BEAMCODE_CHANNEL_HPP

#include "beamcode/array_model.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

namespace beamcode
{

struct Ray
{
    double aod_deg = 90.0;
    double aoa_deg = 90.0;
    cplx gain{1.0, 0.0}; // linear amplitude
    std::size_t tap = 0; // delay in samples
};

struct ChannelRealization
{
    std::vector<Ray> rays;
    bool los_present = false;
    std::uint64_t seed = 0;

    std::size_t num_taps() const noexcept;
};

/*!MD
# ChannelConfig
Simplified clustered indoor channel. Per cluster:

- AoD and AoA centers uniform on (0, 180) deg, drawn independently
- reflection loss ~ Gaussian(`cluster_loss_mean_db`, `cluster_loss_rms_db`), re-drawn until it is
  at most `cluster_loss_truncation_db`
- excess delay ~ Exponential(`cluster_delay_mean_ns`); every ray of a cluster lands on the
  cluster's tap (intra-cluster spread is below one sample at 2 GHz)
- cluster power = free-space gain over the reflected path length times the reflection loss,
  split equally over `rays_per_cluster` rays with independent uniform phases
- ray angles = center + Gaussian(0, `intra_cluster_angle_std_deg`), folded into [0, 180]

With `los` set, a direct ray at tap 0 carries the free-space gain at `distance_m`.
MD!*/
struct ChannelConfig
{
    double path_loss_exponent = 2.0;
    double cluster_loss_mean_db = -10.0;
    double cluster_loss_rms_db = 4.0;
    double cluster_loss_truncation_db = -2.0;
    double intra_cluster_angle_std_deg = 5.0;
    int num_clusters = 4;
    int rays_per_cluster = 3;
    double distance_m = 3.0;
    bool los = true;
    double cluster_delay_mean_ns = 10.0;
    double carrier_hz = 60e9;
    double sample_rate_hz = 2e9;

    void validate() const;

    friend bool operator==(const ChannelConfig &, const ChannelConfig &) = default;
};

// Power gain of free-space propagation over distance_m with the configured exponent (1 m reference).
double path_gain(const ChannelConfig &cfg, double distance_m);

struct LinkBudget
{
    double tx_power_dbm = 10.0;
    double bandwidth_hz = 2e9;
    double noise_figure_plus_impl_db = 12.0;
    std::optional<double> noise_power_mw_override;

    // -174 dBm/Hz + 10 log10(bandwidth) + noise figure
    double noise_power_dbm() const;
    double noise_power_mw() const;
    double tx_power_mw() const;
    // Noise power in units of the transmit power reference.
    double relative_noise_power() const;

    friend bool operator==(const LinkBudget &, const LinkBudget &) = default;
};

// seed_i = mix64(mix64(master) ^ i), with the splitmix64 finalizer as the mix. Mixing the master
// first keeps small masters from sharing index sets (1 ^ i and 2 ^ i permute the same range).
std::uint64_t mix64(std::uint64_t x) noexcept;
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept;

// Two-ray scenario with 4 DFT beams per side (see toy_array): the direct ray joins Tx beam 2
// and Rx beam 3, the reflected ray with amplitude a joins Tx beam 1 and Rx beam 4 (1-based).
ChannelRealization toy_channel(double a, std::size_t nlos_excess_tap = 0);
ArrayConfig toy_array();

// Strong ray on H-Re beams at the edge of the 4-sector L-Re partition, plus four weaker rays
// spread across one sector pair. Multi-level search picks the weak sector pair; exhaustive search
// finds the strong ray. Requires N = 16 DFT codebooks at both ends.
ChannelRealization sector_boundary_channel();

// One truncated Gaussian reflection-loss draw in dB (rejection sampling).
double draw_cluster_loss_db(const ChannelConfig &cfg, std::mt19937_64 &rng);

ChannelRealization sample_channel(const ChannelConfig &cfg, std::uint64_t seed);

// Array responses of every ray, computed once so many weight pairs can be evaluated cheaply.
class ChannelResponse
{
public:
    ChannelResponse(const ChannelRealization &ch, const ArrayConfig &tx, const ArrayConfig &rx);

    std::size_t num_taps() const noexcept { return num_taps_; }
    const ArrayConfig &tx_config() const noexcept { return tx_; }
    const ArrayConfig &rx_config() const noexcept { return rx_; }

    // sum over rays on each tap of gain * x_tx(aod) * x_rx(aoa)
    std::vector<cplx> gain(const WeightVector &tx_w, const WeightVector &rx_w) const;

private:
    ArrayConfig tx_, rx_;
    std::size_t num_taps_;
    std::vector<Ray> rays_;
    std::vector<std::vector<cplx>> tx_resp_, rx_resp_;
};

std::vector<cplx> end_to_end_gain(const WeightVector &tx_w, const ArrayConfig &tx_cfg, const WeightVector &rx_w,
                                  const ArrayConfig &rx_cfg, const ChannelRealization &ch);

// Adds CN(0, budget.relative_noise_power()) to every sample.
std::vector<cplx> add_noise(std::span<const cplx> samples, const LinkBudget &budget, std::uint64_t seed);

} // namespace beamcode

#endif
