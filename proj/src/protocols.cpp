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

#include "beamcode/protocols.hpp"
#include "beamcode/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

namespace beamcode
{

namespace
{
constexpr std::array<std::pair<Scheme, const char *>, 6> scheme_names{{
    {Scheme::exhaustive_pbp, "exhaustive_pbp"},
    {Scheme::multilevel_pbp, "multilevel_pbp"},
    {Scheme::exhaustive_inpacket, "exhaustive_inpacket"},
    {Scheme::feedback_inpacket, "feedback_inpacket"},
    {Scheme::exhaustive_beamcoding, "exhaustive_beamcoding"},
    {Scheme::feedback_beamcoding, "feedback_beamcoding"},
}};

std::vector<int> all_plus(std::size_t n) { return std::vector<int>(n, 1); }

// Shared state of one training run.
class Session
{
public:
    Session(const ProtocolConfig &cfg, const ChannelRealization &ch, std::uint64_t seed)
        : cfg_(cfg), resp_(ch, cfg.tx_codebook.config(), cfg.rx_codebook.config()), rng_(seed)
    {
        cfg.validate();
        const double nt = static_cast<double>(cfg.tx_codebook.config().num_antennas());
        const double nr = static_cast<double>(cfg.rx_codebook.config().num_antennas());
        norm_ = std::sqrt(nt * nr);
        if (!cfg.noiseless)
        {
            const double two_l = 2.0 * static_cast<double>(std::size_t{1} << cfg.ce_length_log2);
            sigma_ = std::sqrt(cfg.budget.relative_noise_power() / (nt * nr * two_l));
        }
        for (const auto &b : cfg.tx_codebook.beams())
            tx_.push_back(cfg.realization.apply(b.weights));
        for (const auto &b : cfg.rx_codebook.beams())
            rx_.push_back(cfg.realization.apply(b.weights));
    }

    const ProtocolConfig &cfg() const { return cfg_; }
    const ChannelResponse &response() const { return resp_; }
    const WeightVector &tx(std::size_t p) const { return tx_[p]; }
    const WeightVector &rx(std::size_t q) const { return rx_[q]; }
    const std::vector<WeightVector> &tx_all() const { return tx_; }
    const std::vector<WeightVector> &rx_all() const { return rx_; }
    double sigma() const { return sigma_; }
    std::size_t taps() const { return resp_.num_taps(); }

    WeightVector program(const WeightVector &w) const { return cfg_.realization.apply(w); }

    // Per-tap CE estimate of one field, normalized.
    std::vector<cplx> measure(const WeightVector &tx_w, const WeightVector &rx_w)
    {
        auto h = resp_.gain(tx_w, rx_w);
        for (auto &v : h)
        {
            v /= norm_;
            if (sigma_ > 0.0)
            {
                const double re = noise_(rng_);
                const double im = noise_(rng_);
                v += sigma_ * std::sqrt(0.5) * cplx{re, im};
            }
        }
        return h;
    }

private:
    const ProtocolConfig &cfg_;
    ChannelResponse resp_;
    std::mt19937_64 rng_;
    std::normal_distribution<double> noise_{0.0, 1.0};
    double norm_ = 1.0;
    double sigma_ = 0.0;
    std::vector<WeightVector> tx_, rx_;
};

void store(CorrelationMatrix &m, std::size_t p, std::size_t q, const std::vector<cplx> &h)
{
    for (std::size_t d = 0; d < h.size(); ++d)
        m.at(p, q, d) = h[d];
}

bool stage_detected(const CorrelationMatrix &m, double noise_std, double factor)
{
    const double peak = m.peak_magnitude();
    return noise_std > 0.0 ? peak > factor * noise_std : peak > 0.0;
}

void finish(TrainingOutcome &out, Session &s, double noise_std, bool detected)
{
    const auto &last = out.correlations.back();
    out.peak_statistic = last.peak_magnitude();
    out.noise_std = noise_std;
    out.detected = detected;
    if (out.detected)
    {
        out.snr_linear = link_snr(s.cfg().budget, s.response(), s.tx(out.best_pair.first), s.rx(out.best_pair.second));
        out.snr_db = 10.0 * std::log10(out.snr_linear);
    }
    else
    {
        out.snr_linear = 0.0;
        out.snr_db = -std::numeric_limits<double>::infinity();
    }
}

std::size_t pbp_packet_bits(const PacketSizes &sizes) { return sizes.preamble_bits + sizes.header_bits; }

std::size_t group_size_for(const ProtocolConfig &cfg, const BeamCodebook &cb)
{
    return cfg.coding_group ? cfg.coding_group : cb.config().num_antennas();
}

// Coded training of `weights` (codebook beams on the coding side) against a fixed other side.
// `tx_side` selects which end codes. Returns decoded per-beam taps, one row per beam.
struct CodedRun
{
    std::vector<std::vector<cplx>> r; // beam -> taps
    std::size_t fields = 0;
    std::size_t bits = 0;
    std::size_t max_fields_per_group = 0;
    std::vector<std::string> warnings;
    std::vector<PowerTrace> traces;
};

CodedRun coded_run(Session &s, const BeamCodebook &cb, bool tx_side, const WeightVector &other)
{
    const auto &cfg = s.cfg();
    CodedRun run;
    run.r.assign(cb.size(), std::vector<cplx>(s.taps()));
    for (const auto &group : coding_groups(cb.size(), group_size_for(cfg, cb)))
    {
        const auto sub = cb.subset(group);
        auto sched = build_schedule(sub, walsh_codes_for(group.size()));
        if (sched.warning)
            run.warnings.push_back(*sched.warning);
        const std::size_t T = sched.num_fields();
        std::vector<WeightVector> fields;
        fields.reserve(T);
        for (const auto &f : sched.fields)
            fields.push_back(s.program(f));

        std::vector<std::vector<cplx>> h(T);
        for (std::size_t t = 0; t < T; ++t)
            h[t] = tx_side ? s.measure(fields[t], other) : s.measure(other, fields[t]);
        for (std::size_t k = 0; k < group.size(); ++k)
            for (std::size_t d = 0; d < s.taps(); ++d)
            {
                cplx acc{};
                for (std::size_t t = 0; t < T; ++t)
                    acc += static_cast<double>(sched.codes[k].chips[t]) * h[t][d];
                run.r[group[k]][d] = acc;
            }

        const auto layout = layout_beam_coding(group.size(), std::numeric_limits<std::size_t>::max(), cfg.sizes);
        run.bits += layout.training_bits();
        run.fields += T;
        run.max_fields_per_group = std::max(run.max_fields_per_group, T);
        if (cfg.record_traces && tx_side)
            run.traces.push_back(power_trace(layout, weights_beam_coding(fields), s.response(), other));
    }
    return run;
}

// Composite of all beams of one side with equal power, as programmed.
WeightVector composite(Session &s, const BeamCodebook &cb)
{
    return s.program(superpose_beams(cb.beams(), all_plus(cb.size())));
}
} // namespace

std::string to_string(Scheme s)
{
    for (const auto &[k, v] : scheme_names)
        if (k == s)
            return v;
    return "unknown";
}

Scheme parse_scheme(const std::string &name)
{
    for (const auto &[k, v] : scheme_names)
        if (name == v)
            return k;
    throw std::invalid_argument("unknown scheme '" + name + "'");
}

bool uses_beam_coding(Scheme s) noexcept
{
    return s == Scheme::exhaustive_beamcoding || s == Scheme::feedback_beamcoding;
}

ProtocolConfig::ProtocolConfig(BeamCodebook tx, BeamCodebook rx, Scheme s)
    : tx_codebook(std::move(tx)), rx_codebook(std::move(rx)), scheme(s)
{
}

void ProtocolConfig::validate() const
{
    if (tx_codebook.size() == 0 || rx_codebook.size() == 0)
        throw std::invalid_argument("ProtocolConfig: empty codebook");
    if (!(detection_factor >= 0.0))
        throw std::invalid_argument("ProtocolConfig: detection_factor must be nonnegative");
    if (ce_length_log2 > 16)
        throw std::invalid_argument("ProtocolConfig: ce_length_log2 too large");
    if (scheme == Scheme::multilevel_pbp)
    {
        for (const auto *cb : {&tx_codebook, &rx_codebook})
        {
            if (num_sectors == 0 || cb->size() % num_sectors != 0)
                throw std::invalid_argument("ProtocolConfig: " + std::to_string(num_sectors) +
                                            " sectors do not divide a codebook of " + std::to_string(cb->size()) +
                                            " beams");
            if (cb->config().num_antennas() % num_sectors != 0)
                throw std::invalid_argument("ProtocolConfig: " + std::to_string(num_sectors) +
                                            " sectors do not divide " +
                                            std::to_string(cb->config().num_antennas()) + " antennas");
        }
    }
}

double link_snr(const LinkBudget &budget, const ChannelResponse &ch, const WeightVector &tx_w, const WeightVector &rx_w)
{
    double g = 0.0;
    for (const auto &h : ch.gain(tx_w, rx_w))
        g += std::norm(h);
    return budget.tx_power_mw() * g / budget.noise_power_mw();
}

double pair_gain(const ProtocolConfig &cfg, const ChannelResponse &ch, std::size_t p, std::size_t q)
{
    const auto tx = cfg.realization.apply(cfg.tx_codebook.beam(p).weights);
    const auto rx = cfg.realization.apply(cfg.rx_codebook.beam(q).weights);
    double g = 0.0;
    for (const auto &h : ch.gain(tx, rx))
        g += std::norm(h);
    return g / static_cast<double>(cfg.tx_codebook.config().num_antennas() * cfg.rx_codebook.config().num_antennas());
}

std::vector<WeightVector> sector_beams(const BeamCodebook &codebook, std::size_t sectors)
{
    const std::size_t P = codebook.size();
    const std::size_t N = codebook.config().num_antennas();
    if (sectors == 0 || P % sectors != 0 || N % sectors != 0)
        throw std::invalid_argument("sector_beams: sectors must divide both the beam and antenna counts");
    const std::size_t per = P / sectors;
    const std::size_t sub = N / sectors;
    const double two_pi_d = 2.0 * std::numbers::pi * codebook.config().spacing();
    std::vector<WeightVector> out;
    for (std::size_t s = 0; s < sectors; ++s)
    {
        double c = 0.0;
        for (std::size_t k = s * per; k < (s + 1) * per; ++k)
            c += std::cos(codebook.beam(k).angle_deg * std::numbers::pi / 180.0);
        c /= static_cast<double>(per);
        std::vector<cplx> w(N);
        for (std::size_t n = 0; n < sub; ++n)
            w[n] = std::polar(1.0 / std::sqrt(static_cast<double>(sub)), -two_pi_d * static_cast<double>(n) * c);
        out.emplace_back(std::move(w));
    }
    return out;
}

std::vector<std::vector<std::size_t>> coding_groups(std::size_t num_beams, std::size_t group_size)
{
    if (group_size == 0)
        throw std::invalid_argument("coding_groups: group size must be positive");
    const std::size_t G = (num_beams + group_size - 1) / group_size;
    std::vector<std::vector<std::size_t>> groups(G);
    for (std::size_t k = 0; k < num_beams; ++k)
        groups[k % G].push_back(k);
    return groups;
}

TrainingOutcome run_exhaustive_pbp(const ProtocolConfig &cfg, const ChannelRealization &ch, std::uint64_t seed)
{
    Session s(cfg, ch, seed);
    const std::size_t P = cfg.tx_codebook.size(), Q = cfg.rx_codebook.size();
    TrainingOutcome out;
    out.scheme = Scheme::exhaustive_pbp;
    CorrelationMatrix m(P, Q, s.taps());
    for (std::size_t p = 0; p < P; ++p)
        for (std::size_t q = 0; q < Q; ++q)
            store(m, p, q, s.measure(s.tx(p), s.rx(q)));
    out.best_pair = m.argmax();
    const bool ok = stage_detected(m, s.sigma(), cfg.detection_factor);
    out.correlations.push_back(std::move(m));
    out.packets_sent = P * Q;
    out.training_bits = out.packets_sent * pbp_packet_bits(cfg.sizes);
    finish(out, s, s.sigma(), ok);
    return out;
}

TrainingOutcome run_multilevel_pbp(const ProtocolConfig &cfg, const ChannelRealization &ch, std::uint64_t seed)
{
    Session s(cfg, ch, seed);
    const std::size_t S = cfg.num_sectors;
    const std::size_t per_t = cfg.tx_codebook.size() / S, per_r = cfg.rx_codebook.size() / S;
    const auto tx_sec = sector_beams(cfg.tx_codebook, S);
    const auto rx_sec = sector_beams(cfg.rx_codebook, S);

    TrainingOutcome out;
    out.scheme = Scheme::multilevel_pbp;
    CorrelationMatrix l1(S, S, s.taps());
    for (std::size_t a = 0; a < S; ++a)
        for (std::size_t b = 0; b < S; ++b)
            store(l1, a, b, s.measure(s.program(tx_sec[a]), s.program(rx_sec[b])));
    const auto [st, sr] = l1.argmax();
    const bool ok1 = stage_detected(l1, s.sigma(), cfg.detection_factor);

    CorrelationMatrix l2(per_t, per_r, s.taps());
    for (std::size_t i = 0; i < per_t; ++i)
        for (std::size_t j = 0; j < per_r; ++j)
            store(l2, i, j, s.measure(s.tx(st * per_t + i), s.rx(sr * per_r + j)));
    const auto [bi, bj] = l2.argmax();
    const bool ok2 = stage_detected(l2, s.sigma(), cfg.detection_factor);
    out.best_pair = {st * per_t + bi, sr * per_r + bj};

    out.correlations.push_back(std::move(l1));
    out.correlations.push_back(std::move(l2));
    out.packets_sent = S * S + per_t * per_r;
    out.training_bits = out.packets_sent * pbp_packet_bits(cfg.sizes);
    finish(out, s, s.sigma(), ok1 && ok2);
    return out;
}

TrainingOutcome run_exhaustive_inpacket(const ProtocolConfig &cfg, const ChannelRealization &ch, std::uint64_t seed)
{
    Session s(cfg, ch, seed);
    const std::size_t P = cfg.tx_codebook.size(), Q = cfg.rx_codebook.size();
    TrainingOutcome out;
    out.scheme = Scheme::exhaustive_inpacket;
    const auto layout = layout_80211ad(P, cfg.sizes);
    CorrelationMatrix m(P, Q, s.taps());
    for (std::size_t q = 0; q < Q; ++q)
    {
        for (std::size_t p = 0; p < P; ++p)
            store(m, p, q, s.measure(s.tx(p), s.rx(q)));
        if (cfg.record_traces)
            out.power_traces.push_back(power_trace(layout, weights_80211ad(s.tx_all()), s.response(), s.rx(q)));
    }
    out.best_pair = m.argmax();
    const bool ok = stage_detected(m, s.sigma(), cfg.detection_factor);
    out.correlations.push_back(std::move(m));
    out.packets_sent = Q;
    out.training_bits = Q * layout.training_bits();
    finish(out, s, s.sigma(), ok);
    return out;
}

TrainingOutcome run_feedback_inpacket(const ProtocolConfig &cfg, const ChannelRealization &ch, std::uint64_t seed)
{
    Session s(cfg, ch, seed);
    const std::size_t P = cfg.tx_codebook.size(), Q = cfg.rx_codebook.size();
    TrainingOutcome out;
    out.scheme = Scheme::feedback_inpacket;

    const auto rx_comp = composite(s, cfg.rx_codebook);
    CorrelationMatrix st1(P, 1, s.taps());
    for (std::size_t p = 0; p < P; ++p)
        store(st1, p, 0, s.measure(s.tx(p), rx_comp));
    const std::size_t p_best = st1.argmax().first;
    const bool ok1 = stage_detected(st1, s.sigma(), cfg.detection_factor);

    CorrelationMatrix st2(1, Q, s.taps());
    for (std::size_t q = 0; q < Q; ++q)
        store(st2, 0, q, s.measure(s.tx(p_best), s.rx(q)));
    const std::size_t q_best = st2.argmax().second;
    const bool ok2 = stage_detected(st2, s.sigma(), cfg.detection_factor);

    const auto l1 = layout_80211ad(P, cfg.sizes);
    const auto l2 = layout_80211ad(Q, cfg.sizes);
    if (cfg.record_traces)
        out.power_traces.push_back(power_trace(l1, weights_80211ad(s.tx_all()), s.response(), rx_comp));
    out.best_pair = {p_best, q_best};
    out.correlations.push_back(std::move(st1));
    out.correlations.push_back(std::move(st2));
    out.packets_sent = 2;
    out.training_bits = l1.training_bits() + l2.training_bits();
    out.feedback_bits = cfg.feedback_bits;
    finish(out, s, s.sigma(), ok1 && ok2);
    return out;
}

TrainingOutcome run_exhaustive_beamcoding(const ProtocolConfig &cfg, const ChannelRealization &ch, std::uint64_t seed)
{
    Session s(cfg, ch, seed);
    const std::size_t P = cfg.tx_codebook.size(), Q = cfg.rx_codebook.size();
    TrainingOutcome out;
    out.scheme = Scheme::exhaustive_beamcoding;
    CorrelationMatrix m(P, Q, s.taps());
    std::size_t T = 1;
    for (std::size_t q = 0; q < Q; ++q)
    {
        auto run = coded_run(s, cfg.tx_codebook, true, s.rx(q));
        for (std::size_t p = 0; p < P; ++p)
            store(m, p, q, run.r[p]);
        T = run.max_fields_per_group;
        out.training_bits += run.bits;
        if (q == 0)
            out.warnings = run.warnings;
        for (auto &tr : run.traces)
            out.power_traces.push_back(std::move(tr));
    }
    out.best_pair = m.argmax();
    const double noise = s.sigma() * std::sqrt(static_cast<double>(T));
    const bool ok = stage_detected(m, noise, cfg.detection_factor);
    out.correlations.push_back(std::move(m));
    out.packets_sent = Q;
    finish(out, s, noise, ok);
    return out;
}

TrainingOutcome run_feedback_beamcoding(const ProtocolConfig &cfg, const ChannelRealization &ch, std::uint64_t seed)
{
    Session s(cfg, ch, seed);
    const std::size_t P = cfg.tx_codebook.size(), Q = cfg.rx_codebook.size();
    TrainingOutcome out;
    out.scheme = Scheme::feedback_beamcoding;

    const auto rx_comp = composite(s, cfg.rx_codebook);
    auto run1 = coded_run(s, cfg.tx_codebook, true, rx_comp);
    CorrelationMatrix st1(P, 1, s.taps());
    for (std::size_t p = 0; p < P; ++p)
        store(st1, p, 0, run1.r[p]);
    const std::size_t p_best = st1.argmax().first;
    const double noise1 = s.sigma() * std::sqrt(static_cast<double>(run1.max_fields_per_group));
    const bool ok1 = stage_detected(st1, noise1, cfg.detection_factor);

    // Stage 2: Tx holds its beam, Rx codes its beams across the fields.
    auto run2 = coded_run(s, cfg.rx_codebook, false, s.tx(p_best));
    CorrelationMatrix st2(1, Q, s.taps());
    for (std::size_t q = 0; q < Q; ++q)
        store(st2, 0, q, run2.r[q]);
    const std::size_t q_best = st2.argmax().second;
    const double noise2 = s.sigma() * std::sqrt(static_cast<double>(run2.max_fields_per_group));
    const bool ok2 = stage_detected(st2, noise2, cfg.detection_factor);

    out.best_pair = {p_best, q_best};
    out.warnings = run1.warnings;
    out.warnings.insert(out.warnings.end(), run2.warnings.begin(), run2.warnings.end());
    out.power_traces = std::move(run1.traces);
    out.correlations.push_back(std::move(st1));
    out.correlations.push_back(std::move(st2));
    out.packets_sent = 2;
    out.training_bits = run1.bits + run2.bits;
    out.feedback_bits = cfg.feedback_bits;
    finish(out, s, noise2, ok1 && ok2);
    return out;
}

TrainingOutcome run_training(const ProtocolConfig &cfg, const ChannelRealization &ch, std::uint64_t seed)
{
    switch (cfg.scheme)
    {
    case Scheme::exhaustive_pbp:
        return run_exhaustive_pbp(cfg, ch, seed);
    case Scheme::multilevel_pbp:
        return run_multilevel_pbp(cfg, ch, seed);
    case Scheme::exhaustive_inpacket:
        return run_exhaustive_inpacket(cfg, ch, seed);
    case Scheme::feedback_inpacket:
        return run_feedback_inpacket(cfg, ch, seed);
    case Scheme::exhaustive_beamcoding:
        return run_exhaustive_beamcoding(cfg, ch, seed);
    case Scheme::feedback_beamcoding:
        return run_feedback_beamcoding(cfg, ch, seed);
    }
    throw std::logic_error("run_training: unhandled scheme");
}

} // namespace beamcode
