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

#include "beamcode/channel.hpp"
#include "beamcode/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace beamcode
{

namespace
{
constexpr double speed_of_light = 299792458.0;

double rad2deg(double r) { return r * 180.0 / std::numbers::pi; }

// Reflect into [0, 180]; a ULA cannot tell phi from -phi or 360 - phi.
double fold_angle(double deg)
{
    deg = std::fmod(deg, 360.0);
    if (deg < 0.0)
        deg += 360.0;
    if (deg > 180.0)
        deg = 360.0 - deg;
    return deg;
}

double angle_of_cos(double c) { return rad2deg(std::acos(std::clamp(c, -1.0, 1.0))); }
} // namespace

std::size_t ChannelRealization::num_taps() const noexcept
{
    std::size_t n = 0;
    for (const auto &r : rays)
        n = std::max(n, r.tap + 1);
    return n;
}

void ChannelConfig::validate() const
{
    auto fail = [](const std::string &what) { throw std::invalid_argument("ChannelConfig: " + what); };
    if (!(path_loss_exponent > 0.0))
        fail("path_loss_exponent must be positive");
    if (!(cluster_loss_rms_db >= 0.0))
        fail("cluster_loss_rms_db must be nonnegative");
    if (!(cluster_loss_truncation_db <= 0.0))
        fail("cluster_loss_truncation_db must not be positive");
    if (cluster_loss_rms_db == 0.0 && cluster_loss_mean_db > cluster_loss_truncation_db)
        fail("cluster loss distribution has no mass below the truncation point");
    // Rejection sampling needs a non-negligible acceptance probability.
    if (cluster_loss_rms_db > 0.0 && (cluster_loss_mean_db - cluster_loss_truncation_db) / cluster_loss_rms_db > 6.0)
        fail("truncation point lies more than 6 standard deviations below the cluster loss mean");
    if (!(intra_cluster_angle_std_deg >= 0.0))
        fail("intra_cluster_angle_std_deg must be nonnegative");
    if (num_clusters < 0)
        fail("num_clusters must be nonnegative");
    if (rays_per_cluster < 1)
        fail("rays_per_cluster must be at least 1");
    if (!(distance_m > 0.0))
        fail("distance_m must be positive");
    if (!(cluster_delay_mean_ns >= 0.0))
        fail("cluster_delay_mean_ns must be nonnegative");
    if (!(carrier_hz > 0.0))
        fail("carrier_hz must be positive");
    if (!(sample_rate_hz > 0.0))
        fail("sample_rate_hz must be positive");
}

double path_gain(const ChannelConfig &cfg, double distance_m)
{
    if (!(distance_m > 0.0))
        throw std::invalid_argument("path_gain: distance must be positive");
    const double lambda = speed_of_light / cfg.carrier_hz;
    const double fs = lambda / (4.0 * std::numbers::pi);
    return fs * fs * std::pow(distance_m, -cfg.path_loss_exponent);
}

double LinkBudget::noise_power_dbm() const
{
    if (noise_power_mw_override)
        return *noise_power_mw_override > 0.0 ? 10.0 * std::log10(*noise_power_mw_override)
                                              : -std::numeric_limits<double>::infinity();
    return -174.0 + 10.0 * std::log10(bandwidth_hz) + noise_figure_plus_impl_db;
}

double LinkBudget::noise_power_mw() const
{
    if (noise_power_mw_override)
        return *noise_power_mw_override;
    return std::pow(10.0, noise_power_dbm() / 10.0);
}

double LinkBudget::tx_power_mw() const { return std::pow(10.0, tx_power_dbm / 10.0); }

double LinkBudget::relative_noise_power() const { return noise_power_mw() / tx_power_mw(); }

std::uint64_t mix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept { return mix64(mix64(master) ^ index); }

ArrayConfig toy_array() { return ArrayConfig(4, 0.5); }

ChannelRealization toy_channel(double a, std::size_t nlos_excess_tap)
{
    if (!(a > 0.0 && a < 1.0))
        throw std::invalid_argument("toy_channel: a must lie in (0, 1)");
    // 4-element DFT grid: beams 1..4 at 180, 120, 90, 60 deg.
    ChannelRealization ch;
    ch.los_present = true;
    ch.rays.push_back({120.0, 90.0, cplx{1.0, 0.0}, 0});
    ch.rays.push_back({180.0, 60.0, cplx{a, 0.0}, nlos_excess_tap});
    return ch;
}

ChannelRealization sector_boundary_channel()
{
    // cos grid of the 16-beam DFT codebook is k / 8, k = -8..7; sector s holds k = 4s - 8 .. 4s - 5.
    ChannelRealization ch;
    ch.los_present = false;
    const double edge = angle_of_cos(-5.0 / 8.0); // last beam of sector 0
    ch.rays.push_back({edge, edge, cplx{1.0, 0.0}, 0});

    // Four weaker rays scattered between the beams of sector 2 on both sides.
    const double weak = std::sqrt(0.15);
    const double c[4] = {0.0625, 0.1875, 0.3125, 0.125};
    for (std::size_t i = 0; i < 4; ++i)
        ch.rays.push_back({angle_of_cos(c[i]), angle_of_cos(c[(i + 1) % 4]), cplx{weak, 0.0}, i + 1});
    return ch;
}

double draw_cluster_loss_db(const ChannelConfig &cfg, std::mt19937_64 &rng)
{
    std::normal_distribution<double> loss(cfg.cluster_loss_mean_db, cfg.cluster_loss_rms_db);
    for (;;)
    {
        const double v = loss(rng);
        if (v <= cfg.cluster_loss_truncation_db)
            return v;
    }
}

ChannelRealization sample_channel(const ChannelConfig &cfg, std::uint64_t seed)
{
    cfg.validate();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> angle(0.0, 180.0);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    std::normal_distribution<double> spread(0.0, 1.0);

    ChannelRealization ch;
    ch.seed = seed;
    ch.los_present = cfg.los;

    if (cfg.los)
    {
        const double aod = angle(rng);
        const double aoa = angle(rng);
        const double amp = std::sqrt(path_gain(cfg, cfg.distance_m));
        ch.rays.push_back({aod, aoa, std::polar(amp, phase(rng)), 0});
    }

    const double mean_s = cfg.cluster_delay_mean_ns * 1e-9;
    for (int c = 0; c < cfg.num_clusters; ++c)
    {
        const double aod_c = angle(rng);
        const double aoa_c = angle(rng);
        const double loss_db = draw_cluster_loss_db(cfg, rng);
        double tau = 0.0;
        if (mean_s > 0.0)
            tau = std::exponential_distribution<double>(1.0 / mean_s)(rng);
        const auto tap = static_cast<std::size_t>(std::llround(tau * cfg.sample_rate_hz));
        const double power = path_gain(cfg, cfg.distance_m + speed_of_light * tau) * std::pow(10.0, loss_db / 10.0);
        const double amp = std::sqrt(power / cfg.rays_per_cluster);
        for (int r = 0; r < cfg.rays_per_cluster; ++r)
        {
            const double aod = fold_angle(aod_c + cfg.intra_cluster_angle_std_deg * spread(rng));
            const double aoa = fold_angle(aoa_c + cfg.intra_cluster_angle_std_deg * spread(rng));
            ch.rays.push_back({aod, aoa, std::polar(amp, phase(rng)), tap});
        }
    }
    return ch;
}

ChannelResponse::ChannelResponse(const ChannelRealization &ch, const ArrayConfig &tx, const ArrayConfig &rx)
    : tx_(tx), rx_(rx), num_taps_(ch.num_taps()), rays_(ch.rays)
{
    tx_resp_.reserve(rays_.size());
    rx_resp_.reserve(rays_.size());
    for (const auto &r : rays_)
    {
        tx_resp_.push_back(array_response(tx_, r.aod_deg));
        rx_resp_.push_back(array_response(rx_, r.aoa_deg));
    }
}

std::vector<cplx> ChannelResponse::gain(const WeightVector &tx_w, const WeightVector &rx_w) const
{
    if (tx_w.size() != tx_.num_antennas() || rx_w.size() != rx_.num_antennas())
        throw dimension_error("ChannelResponse::gain: weight length does not match the array");
    std::vector<cplx> h(num_taps_);
    for (std::size_t i = 0; i < rays_.size(); ++i)
    {
        cplx xt{}, xr{};
        for (std::size_t n = 0; n < tx_w.size(); ++n)
            xt += tx_w[n] * tx_resp_[i][n];
        for (std::size_t n = 0; n < rx_w.size(); ++n)
            xr += rx_w[n] * rx_resp_[i][n];
        h[rays_[i].tap] += rays_[i].gain * xt * xr;
    }
    return h;
}

std::vector<cplx> end_to_end_gain(const WeightVector &tx_w, const ArrayConfig &tx_cfg, const WeightVector &rx_w,
                                  const ArrayConfig &rx_cfg, const ChannelRealization &ch)
{
    return ChannelResponse(ch, tx_cfg, rx_cfg).gain(tx_w, rx_w);
}

std::vector<cplx> add_noise(std::span<const cplx> samples, const LinkBudget &budget, std::uint64_t seed)
{
    std::vector<cplx> out(samples.begin(), samples.end());
    const double n0 = budget.relative_noise_power();
    if (n0 <= 0.0)
        return out;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, std::sqrt(n0 / 2.0));
    for (auto &v : out)
    {
        const double re = g(rng);
        const double im = g(rng);
        v += cplx{re, im};
    }
    return out;
}

} // namespace beamcode
