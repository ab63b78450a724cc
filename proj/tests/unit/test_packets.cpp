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
#include "beamcode/beam_coding.hpp"
#include "beamcode/channel.hpp"
#include "beamcode/errors.hpp"
#include "beamcode/packets.hpp"

#include <doctest.h>

#include <cmath>

using namespace beamcode;

TEST_CASE("802.11ad layout sizes")
{
    const auto l1 = layout_80211ad(1);
    CHECK(l1.agc_bits() == 1280);
    CHECK(l1.trn_bits() == 2560 + 1024);
    CHECK(l1.training_bits() == 4864);
    CHECK(l1.total_bits() == 2176 + 1024 + 4864);
    CHECK(layout_80211ad(16).training_bits() == 16 * 4864);
    CHECK(layout_80211ad(16).training_bits() == 77824);
    CHECK(layout_80211ad(16).trn_fields.size() == 16);
    CHECK_THROWS(layout_80211ad(0));
}

TEST_CASE("beam coding layout sizes")
{
    CHECK(layout_beam_coding(16, 16).training_bits() == 16384);
    CHECK(layout_beam_coding(1).training_bits() == 1024);
    CHECK(layout_beam_coding(1).agc_bits() == 0);
    CHECK(layout_beam_coding(3).trn_fields.size() == 4);
    CHECK(per_beam_bits(LayoutScheme::ieee80211ad) - per_beam_bits(LayoutScheme::beam_coding) == 3840);
    try
    {
        layout_beam_coding(17, 16);
        FAIL("expected capacity_error");
    }
    catch (const capacity_error &e)
    {
        CHECK(e.achievable() == 16);
    }
    CHECK_THROWS(layout_beam_coding(0));
}

TEST_CASE("custom sizes propagate")
{
    PacketSizes s;
    s.ce_bits = 512;
    s.agc_subfields_per_beam = 2;
    CHECK(per_beam_bits(LayoutScheme::ieee80211ad, s) == 2 * 320 + 4 * 640 + 512);
    CHECK(per_beam_bits(LayoutScheme::beam_coding, s) == 512);
}

TEST_CASE("layout json sums to the total")
{
    for (auto l : {layout_80211ad(4), layout_beam_coding(4)})
    {
        const auto j = to_json(l);
        std::size_t sum = 0;
        for (const auto &s : j.at("sections"))
            sum += s.at("bits").get<std::size_t>();
        CHECK(sum == l.total_bits());
        CHECK(j.at("training_bits").get<std::size_t>() == l.training_bits());
        CHECK(j.at("num_beams").get<std::size_t>() == 4);
    }
    CHECK(to_json(layout_80211ad(2)).at("scheme") == "802.11ad");
    CHECK(to_json(layout_80211ad(2)).at("sections").size() == 2 + 8 + 2);
    CHECK(to_json(layout_beam_coding(2)).at("scheme") == "beam_coding");
}

TEST_CASE("802.11ad power trace on the toy channel")
{
    const double a = 0.5;
    const auto arr = toy_array();
    const auto cb = dft_codebook(arr);
    const ChannelResponse ch(toy_channel(a), arr, arr);
    const auto layout = layout_80211ad(4);
    const auto w = weights_80211ad(cb);

    // Rx on beam 3 (1-based) sees only Tx beam 2; Rx on beam 4 only Tx beam 1.
    const auto t3 = power_trace(layout, w, ch, cb.beam(2).weights);
    const auto t4 = power_trace(layout, w, ch, cb.beam(3).weights);
    const double e3[] = {0.0, 16.0, 0.0, 0.0};
    const double e4[] = {16.0 * a * a, 0.0, 0.0, 0.0};
    for (std::size_t f = 0; f < 4; ++f)
    {
        CHECK(t3.trn_power[f] == doctest::Approx(e3[f]).epsilon(1e-12));
        CHECK(t4.trn_power[f] == doctest::Approx(e4[f]).epsilon(1e-12));
    }

    // Equal-power Rx composite: fields follow [a^2, 1, 0, 0].
    const std::vector<int> plus(4, 1);
    const auto comp = superpose_beams(cb.beams(), plus);
    const auto tc = power_trace(layout, w, ch, comp);
    CHECK(tc.trn_power[0] / tc.trn_power[1] == doctest::Approx(a * a).epsilon(1e-12));
    CHECK(tc.trn_power[2] < 1e-20);
    CHECK(tc.trn_power[3] < 1e-20);
    CHECK(tc.agc_gain == doctest::Approx(1.0 / tc.preamble_power));
}

TEST_CASE("beam coding power trace equals per-field direct computation")
{
    const ArrayConfig tx(16);
    const ArrayConfig rx(1);
    const WeightVector rx_w(std::vector<cplx>{1.0});
    const auto cb = dft_codebook(tx);
    const auto sched = build_schedule(cb, walsh_codes_for(16));
    const auto layout = layout_beam_coding(16);
    const auto w = weights_beam_coding(sched);
    ChannelConfig cc;
    cc.los = false;
    for (std::uint64_t s = 0; s < 1000; ++s)
    {
        const ChannelResponse ch(sample_channel(cc, derive_seed(3, s)), tx, rx);
        const auto tr = power_trace(layout, w, ch, rx_w);
        REQUIRE(tr.trn_power.size() == 16);
        double coded = 0.0;
        for (std::size_t t = 0; t < 16; ++t)
        {
            double direct = 0.0;
            for (const auto &h : ch.gain(sched.fields[t], rx_w))
                direct += std::norm(h);
            CHECK(tr.trn_power[t] == doctest::Approx(direct).epsilon(1e-12));
            coded += tr.trn_power[t];
        }
        // Orthogonal codes: total coded power equals the total over single beams.
        double single = 0.0;
        for (std::size_t p = 0; p < 16; ++p)
            for (const auto &h : ch.gain(cb.beam(p).weights, rx_w))
                single += std::norm(h);
        CHECK(coded == doctest::Approx(single).epsilon(1e-9));
    }
}

TEST_CASE("zero channel gives an all-zero trace")
{
    ChannelRealization zero;
    zero.rays.push_back({90.0, 90.0, cplx{}, 0});
    const auto arr = toy_array();
    const auto cb = dft_codebook(arr);
    const ChannelResponse ch(zero, arr, arr);
    for (auto layout : {layout_80211ad(4), layout_beam_coding(4)})
    {
        const auto w = layout.scheme == LayoutScheme::ieee80211ad ? weights_80211ad(cb)
                                                                  : weights_beam_coding(build_schedule(cb, walsh_codes(2)));
        const auto tr = power_trace(layout, w, ch, cb.beam(0).weights);
        CHECK(tr.preamble_power == 0.0);
        CHECK(tr.agc_gain == 0.0);
        for (double p : tr.trn_power)
            CHECK(p == 0.0);
    }
}

TEST_CASE("training weights")
{
    const auto cb = dft_codebook(ArrayConfig(8));
    const auto ad = weights_80211ad(cb);
    REQUIRE(ad.preamble.size() == 1);
    CHECK(ad.preamble[0].energy() == doctest::Approx(1.0));
    CHECK(ad.trn.size() == 8);
    const auto bc = weights_beam_coding(build_schedule(cb, walsh_codes(3)));
    CHECK(bc.preamble.size() == 8);
    CHECK(bc.trn.size() == 8);
    CHECK_THROWS(weights_beam_coding(std::vector<WeightVector>{}));
}

TEST_CASE("preamble waveform")
{
    const auto chips = preamble_chips();
    REQUIRE(chips.size() == 2176);
    const auto g = golay_pair(7);
    for (std::size_t n = 0; n < chips.size(); n += 97)
        CHECK(chips[n] == cplx(g.a[n % 128]));

    // Flat channel, single preamble weight: samples are the chips scaled by the gain.
    const auto arr = toy_array();
    const auto cb = dft_codebook(arr);
    const ChannelResponse ch(toy_channel(0.5), arr, arr);
    const auto w = weights_80211ad(cb);
    const auto rx_w = cb.beam(2).weights;
    const auto y = preamble_samples(w, ch, rx_w);
    REQUIRE(y.size() == 2176);
    const cplx h = ch.gain(w.preamble[0], rx_w)[0];
    for (std::size_t n = 0; n < y.size(); n += 131)
        CHECK(std::abs(y[n] - h * chips[n]) < 1e-12);
}
