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

#include "beamcode/packets.hpp"
#include "beamcode/errors.hpp"

#include <cmath>
#include <stdexcept>

namespace beamcode
{

std::string to_string(LayoutScheme s)
{
    switch (s)
    {
    case LayoutScheme::ieee80211ad:
        return "802.11ad";
    case LayoutScheme::beam_coding:
        return "beam_coding";
    }
    return "unknown";
}

std::size_t PacketLayout::trn_bits() const noexcept
{
    std::size_t b = 0;
    for (const auto &f : trn_fields)
        b += f.ce_bits + f.delay_subfield_bits;
    return b;
}

PacketLayout layout_80211ad(std::size_t num_beams, const PacketSizes &sizes)
{
    if (num_beams == 0)
        throw std::invalid_argument("layout_80211ad: need at least one beam");
    PacketLayout l;
    l.scheme = LayoutScheme::ieee80211ad;
    l.num_beams = num_beams;
    l.preamble_bits = sizes.preamble_bits;
    l.header_bits = sizes.header_bits;
    l.agc_subfields = sizes.agc_subfields_per_beam * num_beams;
    l.agc_subfield_bits = sizes.agc_subfield_bits;
    for (std::size_t k = 0; k < num_beams; ++k)
        l.trn_fields.push_back(
            {sizes.ce_bits, sizes.delay_subfields_per_field * sizes.delay_subfield_bits, k, "beam:" + std::to_string(k)});
    return l;
}

PacketLayout layout_beam_coding(std::size_t num_beams, std::size_t orthogonal_capacity, const PacketSizes &sizes)
{
    if (num_beams == 0)
        throw std::invalid_argument("layout_beam_coding: need at least one beam");
    if (num_beams > orthogonal_capacity)
        throw capacity_error("layout_beam_coding: " + std::to_string(num_beams) + " beams requested but only " +
                                 std::to_string(orthogonal_capacity) + " mutually orthogonal beams exist",
                             orthogonal_capacity);
    PacketLayout l;
    l.scheme = LayoutScheme::beam_coding;
    l.num_beams = num_beams;
    l.preamble_bits = sizes.preamble_bits;
    l.header_bits = sizes.header_bits;
    const std::size_t T = next_power_of_two(num_beams);
    for (std::size_t t = 0; t < T; ++t)
        l.trn_fields.push_back({sizes.ce_bits, 0, t, "coded:" + std::to_string(t)});
    return l;
}

std::size_t per_beam_bits(LayoutScheme scheme, const PacketSizes &sizes)
{
    return scheme == LayoutScheme::ieee80211ad ? layout_80211ad(1, sizes).training_bits()
                                               : layout_beam_coding(1, 1, sizes).training_bits();
}

nlohmann::json to_json(const PacketLayout &layout)
{
    nlohmann::json sections = nlohmann::json::array();
    sections.push_back({{"name", "preamble"}, {"bits", layout.preamble_bits}, {"weight", "preamble"}});
    sections.push_back({{"name", "header"}, {"bits", layout.header_bits}, {"weight", "preamble"}});
    const std::size_t per_beam = layout.num_beams ? layout.agc_subfields / layout.num_beams : 0;
    for (std::size_t i = 0; i < layout.agc_subfields; ++i)
        sections.push_back({{"name", "agc[" + std::to_string(i) + "]"},
                            {"bits", layout.agc_subfield_bits},
                            {"weight", "beam:" + std::to_string(per_beam ? i / per_beam : 0)}});
    for (std::size_t t = 0; t < layout.trn_fields.size(); ++t)
    {
        const auto &f = layout.trn_fields[t];
        sections.push_back({{"name", "trn[" + std::to_string(t) + "]"},
                            {"bits", f.ce_bits + f.delay_subfield_bits},
                            {"ce_bits", f.ce_bits},
                            {"delay_bits", f.delay_subfield_bits},
                            {"weight", f.weight_label}});
    }
    return {{"scheme", to_string(layout.scheme)},
            {"num_beams", layout.num_beams},
            {"training_bits", layout.training_bits()},
            {"total_bits", layout.total_bits()},
            {"sections", std::move(sections)}};
}

TrainingWeights weights_80211ad(std::span<const WeightVector> beams)
{
    if (beams.empty())
        throw std::invalid_argument("weights_80211ad: empty beam set");
    const std::size_t N = beams.front().size();
    std::vector<cplx> sum(N);
    TrainingWeights w;
    for (const auto &b : beams)
    {
        if (b.size() != N)
            throw dimension_error("weights_80211ad: beams differ in length");
        w.trn.push_back(b);
        for (std::size_t n = 0; n < N; ++n)
            sum[n] += b[n];
    }
    WeightVector composite(std::move(sum));
    const double e = composite.energy();
    if (e <= 0.0)
        throw std::invalid_argument("weights_80211ad: trained beams cancel in the composite");
    w.preamble.push_back(composite.scaled(1.0 / std::sqrt(e)));
    return w;
}

TrainingWeights weights_80211ad(const BeamCodebook &beams)
{
    std::vector<WeightVector> w;
    for (const auto &b : beams.beams())
        w.push_back(b.weights);
    return weights_80211ad(w);
}

TrainingWeights weights_beam_coding(std::vector<WeightVector> fields)
{
    if (fields.empty())
        throw std::invalid_argument("weights_beam_coding: no fields");
    return {fields, fields};
}

TrainingWeights weights_beam_coding(const CodedWeightSchedule &schedule) { return weights_beam_coding(schedule.fields); }

PowerTrace power_trace(const PacketLayout &layout, const TrainingWeights &weights, const ChannelResponse &ch,
                       const WeightVector &rx_w)
{
    auto tap_power = [&](const WeightVector &w) {
        double p = 0.0;
        for (const auto &h : ch.gain(w, rx_w))
            p += std::norm(h);
        return p;
    };
    if (weights.preamble.empty())
        throw std::invalid_argument("power_trace: no preamble weights");

    PowerTrace tr;
    for (const auto &w : weights.preamble)
        tr.preamble_power += tap_power(w);
    tr.preamble_power /= static_cast<double>(weights.preamble.size());
    tr.agc_gain = tr.preamble_power > 0.0 ? 1.0 / tr.preamble_power : 0.0;

    tr.trn_power.reserve(layout.trn_fields.size());
    for (const auto &f : layout.trn_fields)
    {
        if (f.weight_index >= weights.trn.size())
            throw std::out_of_range("power_trace: TRN field refers to missing weight " +
                                    std::to_string(f.weight_index));
        tr.trn_power.push_back(tap_power(weights.trn[f.weight_index]));
    }
    return tr;
}

std::vector<cplx> preamble_chips(std::size_t preamble_bits)
{
    const auto g = golay_pair(7);
    std::vector<cplx> x(preamble_bits);
    for (std::size_t n = 0; n < preamble_bits; ++n)
        x[n] = static_cast<double>(g.a[n % g.length()]);
    return x;
}

std::vector<cplx> preamble_samples(const TrainingWeights &weights, const ChannelResponse &ch, const WeightVector &rx_w,
                                   std::size_t preamble_bits)
{
    const std::size_t S = weights.preamble.size();
    if (S == 0)
        throw std::invalid_argument("preamble_samples: no preamble weights");
    if (S > preamble_bits)
        throw std::invalid_argument("preamble_samples: more segments than preamble chips");

    std::vector<std::vector<cplx>> h(S);
    for (std::size_t s = 0; s < S; ++s)
        h[s] = ch.gain(weights.preamble[s], rx_w);
    auto segment = [&](std::size_t n) { return n * S / preamble_bits; };

    // Only taps that carry energy in some segment contribute.
    std::vector<std::size_t> live;
    for (std::size_t d = 0; d < ch.num_taps(); ++d)
        for (std::size_t s = 0; s < S; ++s)
            if (h[s][d] != cplx{})
            {
                live.push_back(d);
                break;
            }

    const auto x = preamble_chips(preamble_bits);
    std::vector<cplx> y(preamble_bits);
    for (std::size_t n = 0; n < preamble_bits; ++n)
        for (std::size_t d : live)
            if (d <= n)
                y[n] += h[segment(n - d)][d] * x[n - d];
    return y;
}

} // namespace beamcode
