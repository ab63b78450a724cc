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

#include "beamcode/array_model.hpp"
#include "beamcode/channel.hpp"
#include "beamcode/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>

using namespace beamcode;

namespace
{
constexpr double pi = std::numbers::pi;

// x(phi) = sum_n w_n exp(+j 2 pi n d cos phi), summed directly.
cplx oracle_af(const WeightVector &w, double spacing, double deg)
{
    cplx s{};
    const double c = std::cos(deg * pi / 180.0);
    for (std::size_t n = 0; n < w.size(); ++n)
        s += w[n] * std::exp(cplx(0.0, 2.0 * pi * static_cast<double>(n) * spacing * c));
    return s;
}

std::vector<cplx> oracle_gain(const ChannelRealization &ch, const WeightVector &tx, const WeightVector &rx,
                              double spacing)
{
    std::size_t taps = 0;
    for (const auto &r : ch.rays)
        taps = std::max(taps, r.tap + 1);
    std::vector<cplx> h(taps);
    for (const auto &r : ch.rays)
        h[r.tap] += r.gain * oracle_af(tx, spacing, r.aod_deg) * oracle_af(rx, spacing, r.aoa_deg);
    return h;
}

WeightVector random_weights(std::size_t n, std::mt19937_64 &rng)
{
    std::normal_distribution<double> g;
    std::vector<cplx> v(n);
    for (auto &x : v)
        x = {g(rng), g(rng)};
    return WeightVector(v);
}

// Mean of N(mu, s^2) conditioned on x <= b.
double truncated_mean(double mu, double s, double b)
{
    const double beta = (b - mu) / s;
    const double pdf = std::exp(-0.5 * beta * beta) / std::sqrt(2.0 * pi);
    const double cdf = 0.5 * std::erfc(-beta / std::sqrt(2.0));
    return mu - s * pdf / cdf;
}
} // namespace

TEST_CASE("toy channel geometry")
{
    const auto arr = toy_array();
    CHECK(arr.num_antennas() == 4);
    const auto cb = dft_codebook(arr);
    const auto ch = toy_channel(0.5);
    REQUIRE(ch.rays.size() == 2);

    // beam 2 on Tx, beam 3 on Rx (1-based): LOS only, full array gain sqrt(4) * sqrt(4)
    const auto h = end_to_end_gain(cb.beam(1).weights, arr, cb.beam(2).weights, arr, ch);
    REQUIRE(h.size() == 1);
    CHECK(std::abs(h[0]) == doctest::Approx(4.0).epsilon(1e-12));
    // beam 1 / beam 4 sees only the NLOS ray
    const auto h2 = end_to_end_gain(cb.beam(0).weights, arr, cb.beam(3).weights, arr, ch);
    CHECK(std::abs(h2[0]) == doctest::Approx(4.0 * 0.5).epsilon(1e-12));
    // every other pair is in a null of both rays
    for (std::size_t p = 0; p < 4; ++p)
        for (std::size_t q = 0; q < 4; ++q)
            if (!((p == 1 && q == 2) || (p == 0 && q == 3)))
                CHECK(std::abs(end_to_end_gain(cb.beam(p).weights, arr, cb.beam(q).weights, arr, ch)[0]) < 1e-12);

    const auto tiny = toy_channel(1e-9);
    const auto ht = end_to_end_gain(cb.beam(0).weights, arr, cb.beam(3).weights, arr, tiny);
    CHECK(std::abs(ht[0]) < 1e-8);

    CHECK(toy_channel(0.5, 2).num_taps() == 3);
    CHECK_THROWS(toy_channel(1.5));
}

TEST_CASE("feedback stage observation on the toy channel")
{
    const double a = 0.5;
    const auto arr = toy_array();
    const auto cb = dft_codebook(arr);
    const std::vector<int> plus(4, 1);
    const auto rx_comp = superpose_beams(cb.beams(), plus);
    const ChannelResponse ch(toy_channel(a), arr, arr);
    // y[p] normalized by sqrt(Nt Nr) = 4, Rx composite of all four beams
    std::vector<double> y;
    for (std::size_t p = 0; p < 4; ++p)
        y.push_back(std::abs(ch.gain(cb.beam(p).weights, rx_comp)[0]) / 4.0);
    const double expect[] = {0.5 * a, 0.5, 0.0, 0.0};
    for (std::size_t p = 0; p < 4; ++p)
        CHECK(y[p] == doctest::Approx(expect[p]).epsilon(1e-12));
}

TEST_CASE("end_to_end_gain matches ray-by-ray oracle")
{
    std::mt19937_64 rng(5);
    for (std::uint64_t seed : {1u, 2u, 3u, 99u})
    {
        ChannelConfig cfg;
        cfg.los = seed % 2 == 0;
        const auto ch = sample_channel(cfg, seed);
        const ArrayConfig tx(16), rx(8);
        const auto wt = random_weights(16, rng);
        const auto wr = random_weights(8, rng);
        const auto h = end_to_end_gain(wt, tx, wr, rx, ch);
        const auto o = oracle_gain(ch, wt, wr, 0.5);
        REQUIRE(h.size() == o.size());
        for (std::size_t d = 0; d < h.size(); ++d)
            CHECK(std::abs(h[d] - o[d]) < 1e-12 * (1.0 + std::abs(o[d])));
    }
    const auto ch = toy_channel(0.5);
    const auto h = end_to_end_gain(WeightVector::zeros(4), toy_array(), random_weights(4, rng), toy_array(), ch);
    CHECK(h[0] == cplx{});
    CHECK_THROWS_AS(ChannelResponse(ch, toy_array(), toy_array()).gain(WeightVector::zeros(3), WeightVector::zeros(4)),
                    dimension_error);
}

TEST_CASE("reciprocity: swapping ends and angles keeps the gain")
{
    const auto ch = sample_channel(ChannelConfig{}, 42);
    ChannelRealization rev = ch;
    for (auto &r : rev.rays)
        std::swap(r.aod_deg, r.aoa_deg);
    std::mt19937_64 rng(1);
    const ArrayConfig a(16), b(4);
    const auto wa = random_weights(16, rng), wb = random_weights(4, rng);
    const auto h1 = end_to_end_gain(wa, a, wb, b, ch);
    const auto h2 = end_to_end_gain(wb, b, wa, a, rev);
    for (std::size_t d = 0; d < h1.size(); ++d)
        CHECK(std::abs(h1[d] - h2[d]) < 1e-12);
}

TEST_CASE("path gain")
{
    ChannelConfig cfg;
    const double lambda = 299792458.0 / 60e9;
    CHECK(path_gain(cfg, 1.0) == doctest::Approx(std::pow(lambda / (4.0 * pi), 2.0)).epsilon(1e-12));
    const double drop = 10.0 * std::log10(path_gain(cfg, 3.0) / path_gain(cfg, 6.0));
    CHECK(drop == doctest::Approx(20.0 * std::log10(2.0)).epsilon(1e-9));
    CHECK(drop == doctest::Approx(6.02).epsilon(0.001));
    cfg.path_loss_exponent = 3.0;
    CHECK(10.0 * std::log10(path_gain(cfg, 3.0) / path_gain(cfg, 6.0)) ==
          doctest::Approx(30.0 * std::log10(2.0)).epsilon(1e-9));
    CHECK_THROWS(path_gain(cfg, 0.0));
}

TEST_CASE("sample_channel determinism and structure")
{
    ChannelConfig cfg;
    const auto a = sample_channel(cfg, 1234);
    const auto b = sample_channel(cfg, 1234);
    REQUIRE(a.rays.size() == b.rays.size());
    for (std::size_t i = 0; i < a.rays.size(); ++i)
    {
        CHECK(a.rays[i].aod_deg == b.rays[i].aod_deg);
        CHECK(a.rays[i].aoa_deg == b.rays[i].aoa_deg);
        CHECK(a.rays[i].gain == b.rays[i].gain);
        CHECK(a.rays[i].tap == b.rays[i].tap);
    }
    CHECK(a.rays.size() == 1 + 4 * 3);
    CHECK(a.rays.front().tap == 0);
    CHECK(std::abs(a.rays.front().gain) == doctest::Approx(std::sqrt(path_gain(cfg, 3.0))));

    const auto c = sample_channel(cfg, 1235);
    CHECK(c.rays[0].aod_deg != a.rays[0].aod_deg);

    for (const auto &r : a.rays)
    {
        CHECK(r.aod_deg >= 0.0);
        CHECK(r.aod_deg <= 180.0);
        CHECK(r.aoa_deg >= 0.0);
        CHECK(r.aoa_deg <= 180.0);
    }
}

TEST_CASE("NLOS rays stay below the direct-path reference")
{
    ChannelConfig cfg;
    cfg.los = false;
    const double ref = path_gain(cfg, cfg.distance_m);
    for (std::uint64_t s = 0; s < 500; ++s)
    {
        const auto ch = sample_channel(cfg, derive_seed(7, s));
        CHECK_FALSE(ch.los_present);
        REQUIRE(ch.rays.size() == 12);
        for (const auto &r : ch.rays)
            CHECK(std::norm(r.gain) < ref);
        // rays of a cluster share one tap
        for (std::size_t c = 0; c < 4; ++c)
            for (std::size_t k = 1; k < 3; ++k)
                CHECK(ch.rays[3 * c + k].tap == ch.rays[3 * c].tap);
    }
}

TEST_CASE("cluster loss follows the truncated Gaussian")
{
    ChannelConfig cfg;
    std::mt19937_64 rng(2024);
    double sum = 0.0;
    const int n = 10000;
    for (int i = 0; i < n; ++i)
    {
        const double v = draw_cluster_loss_db(cfg, rng);
        CHECK(v <= -2.0);
        sum += v;
    }
    const double oracle = truncated_mean(-10.0, 4.0, -2.0);
    CHECK(std::abs(sum / n - oracle) < 0.5);

    for (int i = 0; i < 1000000; ++i)
        if (draw_cluster_loss_db(cfg, rng) > -2.0)
        {
            FAIL("loss above truncation point");
            break;
        }
}

TEST_CASE("channel config validation")
{
    ChannelConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.cluster_loss_truncation_db = 1.0;
    CHECK_THROWS(cfg.validate());
    cfg = {};
    cfg.distance_m = 0.0;
    CHECK_THROWS(cfg.validate());
    cfg = {};
    cfg.rays_per_cluster = 0;
    CHECK_THROWS(sample_channel(cfg, 1));
}

TEST_CASE("link budget")
{
    LinkBudget b;
    CHECK(b.noise_power_dbm() == doctest::Approx(-174.0 + 10.0 * std::log10(2e9) + 12.0));
    CHECK(b.noise_power_dbm() == doctest::Approx(-68.99).epsilon(1e-4));
    CHECK(b.tx_power_mw() == doctest::Approx(10.0));
    CHECK(b.relative_noise_power() == doctest::Approx(b.noise_power_mw() / 10.0));
    b.noise_power_mw_override = 0.5;
    CHECK(b.noise_power_mw() == 0.5);
}

TEST_CASE("seed derivation")
{
    std::set<std::uint64_t> seen;
    for (std::uint64_t m : {0u, 1u, 2u, 3u})
        for (std::uint64_t i = 0; i < 1000; ++i)
            seen.insert(derive_seed(m, i));
    CHECK(seen.size() == 4000);
    CHECK(derive_seed(5, 17) == derive_seed(5, 17));
    CHECK(mix64(0) != mix64(1));
}

TEST_CASE("add_noise")
{
    LinkBudget b;
    std::vector<cplx> x(1000000, cplx{});
    const auto y = add_noise(x, b, 77);
    double p = 0.0;
    cplx mean{};
    for (const auto &v : y)
    {
        p += std::norm(v);
        mean += v;
    }
    p /= static_cast<double>(y.size());
    CHECK(std::abs(p / b.relative_noise_power() - 1.0) < 0.01);
    CHECK(std::abs(mean) / static_cast<double>(y.size()) < 0.01 * std::sqrt(b.relative_noise_power()));

    const auto y2 = add_noise(x, b, 77);
    CHECK(std::equal(y.begin(), y.begin() + 1000, y2.begin()));

    LinkBudget silent;
    silent.noise_power_mw_override = 0.0;
    const std::vector<cplx> s{cplx(1.0, 2.0), cplx(-3.0, 0.5)};
    const auto out = add_noise(s, silent, 1);
    CHECK(out == s);
}

TEST_CASE("sector boundary channel")
{
    const auto ch = sector_boundary_channel();
    REQUIRE(ch.rays.size() == 5);
    CHECK(std::cos(ch.rays[0].aod_deg * pi / 180.0) == doctest::Approx(-0.625));
    CHECK(std::cos(ch.rays[0].aoa_deg * pi / 180.0) == doctest::Approx(-0.625));
    CHECK(ch.num_taps() == 5);
}
