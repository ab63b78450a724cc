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

#include "beamcode/harness.hpp"
#include "beamcode/errors.hpp"
#include "beamcode/metrics.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>
#include <tuple>

#include <json.hpp>
#include <spdlog/spdlog.h>

namespace beamcode
{

namespace
{

std::string_view trim(std::string_view s)
{
    const auto ws = " \t\r";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_list(std::string_view s)
{
    std::vector<std::string_view> out;
    if (trim(s).empty())
        return out;
    std::size_t pos = 0;
    for (;;)
    {
        const auto c = s.find(',', pos);
        out.push_back(trim(s.substr(pos, c == std::string_view::npos ? std::string_view::npos : c - pos)));
        if (c == std::string_view::npos)
            break;
        pos = c + 1;
    }
    return out;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view expected)
{
    throw config_error("config: key '" + std::string(key) + "' has value '" + std::string(value) + "', expected " +
                       std::string(expected));
}

double parse_double(std::string_view key, std::string_view v)
{
    double out = 0.0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || p != v.data() + v.size() || !std::isfinite(out))
        bad_value(key, v, "a finite number");
    return out;
}

template <class Int> Int parse_int(std::string_view key, std::string_view v)
{
    Int out{};
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || p != v.data() + v.size())
        bad_value(key, v, "an integer");
    return out;
}

bool parse_bool(std::string_view key, std::string_view v)
{
    if (v == "true" || v == "yes" || v == "1")
        return true;
    if (v == "false" || v == "no" || v == "0")
        return false;
    bad_value(key, v, "true or false");
}

std::optional<int> parse_bits(std::string_view key, std::string_view v)
{
    if (v == "inf" || v == "none")
        return std::nullopt;
    const int b = parse_int<int>(key, v);
    if (b < 1)
        bad_value(key, v, "a bit count >= 1 or inf");
    return b;
}

std::string bits_text(const std::optional<int> &b) { return b ? std::to_string(*b) : "inf"; }

template <class T, class F> std::string join(const std::vector<T> &v, F f)
{
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i)
    {
        if (i)
            out += ", ";
        out += f(v[i]);
    }
    return out;
}

std::string env_name(bool los) { return los ? "los" : "nlos"; }

struct Key
{
    const char *name;
    std::function<std::string(const ExperimentConfig &)> get;
    std::function<void(ExperimentConfig &, std::string_view key, std::string_view value)> set;
};

template <class M> Key num_key(const char *name, M member)
{
    using T = std::remove_cvref_t<decltype(std::declval<ExperimentConfig &>().*member)>;
    return {name,
            [member](const ExperimentConfig &c) {
                if constexpr (std::is_floating_point_v<T>)
                    return format_double(c.*member);
                else
                    return std::to_string(c.*member);
            },
            [member](ExperimentConfig &c, std::string_view k, std::string_view v) {
                if constexpr (std::is_floating_point_v<T>)
                    c.*member = parse_double(k, v);
                else
                    c.*member = parse_int<T>(k, v);
            }};
}

template <class Sub, class M> Key sub_key(const char *name, Sub sub, M member)
{
    using T = std::remove_cvref_t<decltype((std::declval<ExperimentConfig &>().*sub).*member)>;
    return {name,
            [sub, member](const ExperimentConfig &c) {
                const auto &v = (c.*sub).*member;
                if constexpr (std::is_same_v<T, bool>)
                    return std::string(v ? "true" : "false");
                else if constexpr (std::is_floating_point_v<T>)
                    return format_double(v);
                else
                    return std::to_string(v);
            },
            [sub, member](ExperimentConfig &c, std::string_view k, std::string_view v) {
                auto &dst = (c.*sub).*member;
                if constexpr (std::is_same_v<T, bool>)
                    dst = parse_bool(k, v);
                else if constexpr (std::is_floating_point_v<T>)
                    dst = parse_double(k, v);
                else
                    dst = parse_int<T>(k, v);
            }};
}

const std::vector<Key> &keys()
{
    using C = ExperimentConfig;
    static const std::vector<Key> table = {
        {"experiment", [](const C &c) { return c.experiment; },
         [](C &c, std::string_view k, std::string_view v) {
             if (v.empty() || v.find_first_of(",\n") != std::string_view::npos)
                 bad_value(k, v, "a non-empty name without commas");
             c.experiment = std::string(v);
         }},
        {"schemes", [](const C &c) { return join(c.schemes, [](Scheme s) { return to_string(s); }); },
         [](C &c, std::string_view k, std::string_view v) {
             c.schemes.clear();
             for (auto item : split_list(v))
             {
                 try
                 {
                     c.schemes.push_back(parse_scheme(std::string(item)));
                 }
                 catch (const std::invalid_argument &)
                 {
                     bad_value(k, item, "a scheme name");
                 }
             }
         }},
        num_key("runs", &C::runs),
        num_key("seed", &C::seed),
        {"output", [](const C &c) { return c.output; },
         [](C &c, std::string_view, std::string_view v) { c.output = std::string(v); }},
        num_key("threads", &C::threads),
        {"noiseless", [](const C &c) { return std::string(c.noiseless ? "true" : "false"); },
         [](C &c, std::string_view k, std::string_view v) { c.noiseless = parse_bool(k, v); }},
        num_key("array.tx_antennas", &C::tx_antennas),
        num_key("array.rx_antennas", &C::rx_antennas),
        num_key("array.power_var_rx_antennas", &C::power_var_rx_antennas),
        num_key("array.spacing", &C::spacing),
        {"training.beams_per_packet",
         [](const C &c) { return join(c.beams_per_packet, [](std::size_t k) { return std::to_string(k); }); },
         [](C &c, std::string_view k, std::string_view v) {
             c.beams_per_packet.clear();
             for (auto item : split_list(v))
                 c.beams_per_packet.push_back(parse_int<std::size_t>(k, item));
         }},
        {"training.environments", [](const C &c) { return join(c.environments, [](bool l) { return env_name(l); }); },
         [](C &c, std::string_view k, std::string_view v) {
             c.environments.clear();
             for (auto item : split_list(v))
             {
                 if (item == "los")
                     c.environments.push_back(true);
                 else if (item == "nlos")
                     c.environments.push_back(false);
                 else
                     bad_value(k, item, "los or nlos");
             }
         }},
        num_key("training.num_sectors", &C::num_sectors),
        num_key("training.feedback_bits", &C::feedback_bits),
        sub_key("channel.path_loss_exponent", &C::channel, &ChannelConfig::path_loss_exponent),
        sub_key("channel.cluster_loss_mean_db", &C::channel, &ChannelConfig::cluster_loss_mean_db),
        sub_key("channel.cluster_loss_rms_db", &C::channel, &ChannelConfig::cluster_loss_rms_db),
        sub_key("channel.cluster_loss_truncation_db", &C::channel, &ChannelConfig::cluster_loss_truncation_db),
        sub_key("channel.intra_cluster_angle_std_deg", &C::channel, &ChannelConfig::intra_cluster_angle_std_deg),
        sub_key("channel.num_clusters", &C::channel, &ChannelConfig::num_clusters),
        sub_key("channel.rays_per_cluster", &C::channel, &ChannelConfig::rays_per_cluster),
        sub_key("channel.distance_m", &C::channel, &ChannelConfig::distance_m),
        sub_key("channel.los", &C::channel, &ChannelConfig::los),
        sub_key("channel.cluster_delay_mean_ns", &C::channel, &ChannelConfig::cluster_delay_mean_ns),
        sub_key("channel.carrier_hz", &C::channel, &ChannelConfig::carrier_hz),
        sub_key("channel.sample_rate_hz", &C::channel, &ChannelConfig::sample_rate_hz),
        sub_key("budget.tx_power_dbm", &C::budget, &LinkBudget::tx_power_dbm),
        sub_key("budget.bandwidth_hz", &C::budget, &LinkBudget::bandwidth_hz),
        sub_key("budget.noise_figure_db", &C::budget, &LinkBudget::noise_figure_plus_impl_db),
        {"budget.noise_power_mw",
         [](const C &c) {
             return c.budget.noise_power_mw_override ? format_double(*c.budget.noise_power_mw_override)
                                                     : std::string("none");
         },
         [](C &c, std::string_view k, std::string_view v) {
             if (v == "none")
                 c.budget.noise_power_mw_override.reset();
             else
                 c.budget.noise_power_mw_override = parse_double(k, v);
         }},
        {"quant.bits", [](const C &c) { return join(c.quant_bits, bits_text); },
         [](C &c, std::string_view k, std::string_view v) {
             c.quant_bits.clear();
             for (auto item : split_list(v))
                 c.quant_bits.push_back(parse_bits(k, item));
         }},
        {"quant.weighting", [](const C &c) { return std::string(c.uniform_weighting ? "uniform" : "nonuniform"); },
         [](C &c, std::string_view k, std::string_view v) {
             if (v == "uniform")
                 c.uniform_weighting = true;
             else if (v == "nonuniform")
                 c.uniform_weighting = false;
             else
                 bad_value(k, v, "uniform or nonuniform");
         }},
        sub_key("pattern.antennas", &C::pattern, &PatternConfig::antennas),
        sub_key("pattern.beams", &C::pattern, &PatternConfig::beams),
        sub_key("pattern.field", &C::pattern, &PatternConfig::field),
        {"pattern.bits", [](const C &c) { return bits_text(c.pattern.bits); },
         [](C &c, std::string_view k, std::string_view v) { c.pattern.bits = parse_bits(k, v); }},
        sub_key("pattern.uniform", &C::pattern, &PatternConfig::uniform),
        sub_key("pattern.step_deg", &C::pattern, &PatternConfig::step_deg),
    };
    return table;
}

std::string cell_id(const ExperimentConfig &cfg, bool los, LayoutScheme s, std::size_t k)
{
    char buf[8];
    std::snprintf(buf, sizeof buf, "K%02zu", k);
    return cfg.experiment + "/" + env_name(los) + "/" + to_string(s) + "/" + buf;
}

BeamCodebook tx_codebook(const ExperimentConfig &cfg)
{
    return dft_codebook(ArrayConfig(cfg.tx_antennas, cfg.spacing));
}

WeightVector fixed_rx_weights(const ArrayConfig &rx)
{
    if (rx.num_antennas() == 1)
        return WeightVector(std::vector<cplx>{1.0});
    return steering_vector(rx, 90.0).weights;
}

} // namespace

void ExperimentConfig::validate() const
{
    auto fail = [](const std::string &m) { throw config_error("config: " + m); };
    if (runs < 1)
        fail("runs must be at least 1");
    if (tx_antennas < 1 || rx_antennas < 1 || power_var_rx_antennas < 1)
        fail("antenna counts must be at least 1");
    if (!(spacing > 0.0))
        fail("array.spacing must be positive");
    if (schemes.empty())
        fail("schemes must not be empty");
    if (environments.empty())
        fail("training.environments must not be empty");
    for (auto k : beams_per_packet)
        if (k < 1 || tx_antennas % k != 0)
            fail("beams_per_packet entry " + std::to_string(k) + " does not divide " + std::to_string(tx_antennas) +
                 " Tx antennas");
    if (pattern.antennas < 1)
        fail("pattern.antennas must be at least 1");
    if (pattern.beams < 1 || pattern.beams > pattern.antennas)
        fail("pattern.beams must lie in [1, pattern.antennas]");
    if (pattern.field >= next_power_of_two(pattern.beams))
        fail("pattern.field exceeds the number of coded fields");
    if (!(pattern.step_deg > 0.0 && pattern.step_deg < 180.0))
        fail("pattern.step_deg must lie in (0, 180)");
    try
    {
        channel.validate();
        (void)dft_codebook(ArrayConfig(tx_antennas, spacing));
        (void)dft_codebook(ArrayConfig(rx_antennas, spacing));
    }
    catch (const std::invalid_argument &e)
    {
        fail(e.what());
    }
}

ExperimentConfig parse_config(std::string_view text)
{
    ExperimentConfig cfg;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size())
    {
        const auto nl = text.find('\n', pos);
        auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw config_error("config line " + std::to_string(line_no) + ": expected 'key = value'");
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        const auto &table = keys();
        const auto it = std::find_if(table.begin(), table.end(), [&](const Key &k) { return key == k.name; });
        if (it == table.end())
            throw config_error("config line " + std::to_string(line_no) + ": unknown key '" + std::string(key) + "'");
        it->set(cfg, key, value);
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in)
        throw config_error("config: cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize(const ExperimentConfig &cfg)
{
    std::string out;
    for (const auto &k : keys())
        out += std::string(k.name) + " = " + k.get(cfg) + "\n";
    return out;
}

std::string format_double(double v)
{
    char buf[64];
    const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{})
        throw std::runtime_error("format_double: conversion failed");
    return std::string(buf, p);
}

std::string CsvTable::str() const
{
    std::string out;
    auto line = [&](const std::vector<std::string> &cells) {
        for (std::size_t i = 0; i < cells.size(); ++i)
        {
            if (i)
                out += ',';
            out += cells[i];
        }
        out += '\n';
    };
    line(header);
    for (const auto &r : rows)
        line(r);
    return out;
}

void CsvTable::write(const std::filesystem::path &path) const
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out << str();
}

void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)> &job)
{
    if (threads == 0)
        threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, std::max<std::size_t>(count, 1));
    if (threads <= 1)
    {
        for (std::size_t i = 0; i < count; ++i)
            job(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++)
            {
                try
                {
                    job(i);
                }
                catch (...)
                {
                    std::lock_guard lock(error_mutex);
                    if (!error)
                        error = std::current_exception();
                }
            }
        });
    for (auto &th : pool)
        th.join();
    if (error)
        std::rethrow_exception(error);
}

std::vector<double> PowerVarCell::gammas() const
{
    std::vector<double> g;
    g.reserve(records.size());
    for (const auto &r : records)
        g.push_back(r.gamma);
    return g;
}

std::vector<double> packet_gammas(const BeamCodebook &tx, std::size_t beams, LayoutScheme scheme,
                                  const ChannelResponse &ch, const WeightVector &rx_w)
{
    std::vector<double> out;
    for (const auto &group : coding_groups(tx.size(), beams))
    {
        if (group.size() != beams)
            throw std::invalid_argument("packet_gammas: beam count does not divide the codebook");
        const auto sub = tx.subset(group);
        PacketLayout layout;
        TrainingWeights w;
        if (scheme == LayoutScheme::ieee80211ad)
        {
            layout = layout_80211ad(beams);
            w = weights_80211ad(sub);
        }
        else
        {
            layout = layout_beam_coding(beams);
            w = weights_beam_coding(build_schedule(sub, walsh_codes_for(beams)));
        }
        const auto trace = power_trace(layout, w, ch, rx_w);
        const auto pre = preamble_samples(w, ch, rx_w, layout.preamble_bits);
        try
        {
            for (const auto &s : power_ratio(trace.trn_power, pre))
                out.push_back(s.gamma);
        }
        catch (const undefined_ratio_error &)
        {
            spdlog::debug("packet_gammas: silent preamble, packet skipped");
        }
    }
    return out;
}

std::vector<PowerVarCell> power_var_campaign(const ExperimentConfig &cfg)
{
    cfg.validate();
    const auto tx = tx_codebook(cfg);
    const ArrayConfig rx(cfg.power_var_rx_antennas, cfg.spacing);
    const auto rx_w = fixed_rx_weights(rx);

    std::vector<PowerVarCell> cells;
    for (bool los : cfg.environments)
        for (auto scheme : {LayoutScheme::ieee80211ad, LayoutScheme::beam_coding})
            for (auto k : cfg.beams_per_packet)
                cells.push_back({cell_id(cfg, los, scheme, k), los, scheme, k, {}});

    // per run, per cell: gammas
    std::vector<std::vector<std::vector<double>>> results(cfg.runs);
    parallel_for(cfg.runs, cfg.threads, [&](std::size_t i) {
        const auto seed = derive_seed(cfg.seed, i);
        auto &slot = results[i];
        slot.resize(cells.size());
        for (bool los : cfg.environments)
        {
            auto ch_cfg = cfg.channel;
            ch_cfg.los = los;
            const ChannelResponse resp(sample_channel(ch_cfg, seed), tx.config(), rx);
            for (std::size_t c = 0; c < cells.size(); ++c)
                if (cells[c].los == los)
                    slot[c] = packet_gammas(tx, cells[c].beams, cells[c].scheme, resp, rx_w);
        }
    });

    for (std::size_t c = 0; c < cells.size(); ++c)
    {
        for (std::size_t i = 0; i < cfg.runs; ++i)
        {
            const auto seed = derive_seed(cfg.seed, i);
            const auto &g = results[i][c];
            for (std::size_t f = 0; f < g.size(); ++f)
                cells[c].records.push_back({cells[c].id, seed, f, g[f]});
        }
        std::sort(cells[c].records.begin(), cells[c].records.end(), [](const GammaRecord &a, const GammaRecord &b) {
            return std::tie(a.seed, a.field) < std::tie(b.seed, b.field);
        });
    }
    std::sort(cells.begin(), cells.end(), [](const auto &a, const auto &b) { return a.id < b.id; });
    return cells;
}

std::vector<QuantPoint> quant_sweep_campaign(const ExperimentConfig &cfg)
{
    cfg.validate();
    const auto tx = dft_codebook(ArrayConfig(cfg.tx_antennas, cfg.spacing));
    const auto rx = dft_codebook(ArrayConfig(cfg.rx_antennas, cfg.spacing));
    const std::array<Scheme, 2> schemes{Scheme::exhaustive_pbp, Scheme::exhaustive_beamcoding};

    std::vector<QuantPoint> points;
    for (bool los : cfg.environments)
        for (const auto &bits : cfg.quant_bits)
            for (auto s : schemes)
            {
                QuantPoint p;
                p.los = los;
                p.bits = bits;
                p.scheme = s;
                p.snr_linear.assign(cfg.runs, 0.0);
                p.seeds.assign(cfg.runs, 0);
                p.pairs.assign(cfg.runs, {0, 0});
                points.push_back(std::move(p));
            }

    parallel_for(cfg.runs, cfg.threads, [&](std::size_t i) {
        const auto seed = derive_seed(cfg.seed, i);
        for (bool los : cfg.environments)
        {
            auto ch_cfg = cfg.channel;
            ch_cfg.los = los;
            const auto ch = sample_channel(ch_cfg, seed);
            for (auto &p : points)
            {
                if (p.los != los)
                    continue;
                ProtocolConfig pc(tx, rx, p.scheme);
                pc.budget = cfg.budget;
                pc.noiseless = cfg.noiseless;
                pc.realization = {p.bits, cfg.uniform_weighting};
                const auto out = run_training(pc, ch, seed);
                p.snr_linear[i] = out.snr_linear;
                p.seeds[i] = seed;
                p.pairs[i] = out.best_pair;
            }
        }
    });

    for (auto &p : points)
        p.aggregate_snr_db = to_db(aggregate_snr(p.snr_linear));
    return points;
}

std::vector<OverheadRow> overhead_table(const ExperimentConfig &cfg)
{
    std::vector<OverheadRow> rows;
    for (auto k : cfg.beams_per_packet)
        rows.push_back({k, layout_80211ad(k).training_bits(), layout_beam_coding(k).training_bits()});
    return rows;
}

WeightVector pattern_weights(const PatternConfig &pc, double spacing)
{
    const ArrayConfig arr(pc.antennas, spacing);
    const auto cb = dft_codebook(arr);
    WeightVector w;
    if (pc.beams == 1)
    {
        // broadside-most DFT beam
        w = cb.beam(pc.antennas / 2).weights;
    }
    else
    {
        // contiguous beams around broadside
        std::vector<std::size_t> group;
        for (std::size_t k = 0; k < pc.beams; ++k)
            group.push_back(pc.antennas / 2 - pc.beams / 2 + k);
        const auto sched = build_schedule(cb.subset(group), walsh_codes_for(pc.beams));
        w = sched.fields.at(pc.field);
    }
    return WeightRealization{pc.bits, pc.uniform}.apply(w);
}

OutputSet cmd_pattern(const ExperimentConfig &cfg)
{
    cfg.validate();
    const auto &pc = cfg.pattern;
    const ArrayConfig arr(pc.antennas, cfg.spacing);
    const auto w = pattern_weights(pc, cfg.spacing);

    CsvTable pattern{{"angle_deg", "gain_db"}, {}};
    const auto samples = array_pattern(w, arr, pc.step_deg);
    double peak = 0.0;
    for (const auto &s : samples)
    {
        pattern.rows.push_back({format_double(s.angle_deg), format_double(to_db(s.power))});
        peak = std::max(peak, s.power);
    }

    // Lobe peaks within 3 dB of the maximum (pointing directions).
    std::vector<std::string> pointing;
    for (std::size_t i = 1; i + 1 < samples.size(); ++i)
        if (samples[i].power > samples[i - 1].power && samples[i].power >= samples[i + 1].power &&
            samples[i].power >= 0.5 * peak)
            pointing.push_back(format_double(samples[i].angle_deg));

    CsvTable summary{{"experiment", "antennas", "beams", "field", "bits", "weighting", "sidelobe_db", "pointing_deg"},
                     {}};
    const auto sll = sidelobe_level(w, arr);
    std::string joined;
    for (std::size_t i = 0; i < pointing.size(); ++i)
        joined += (i ? ";" : "") + pointing[i];
    summary.rows.push_back({cfg.experiment, std::to_string(pc.antennas), std::to_string(pc.beams),
                            std::to_string(pc.field), bits_text(pc.bits), pc.uniform ? "uniform" : "nonuniform",
                            sll ? format_double(*sll) : "none", joined});
    return {{"pattern.csv", pattern.str()}, {"pattern_summary.csv", summary.str()}};
}

OutputSet cmd_power_var(const ExperimentConfig &cfg)
{
    const auto cells = power_var_campaign(cfg);
    CsvTable gamma{{"experiment", "environment", "scheme", "beams", "seed", "field", "gamma"}, {}};
    CsvTable cdf{{"experiment", "value", "cumulative_fraction"}, {}};
    CsvTable summary{{"experiment", "samples", "cdf_at_1", "fraction_above_2", "p95", "max"}, {}};
    for (const auto &c : cells)
    {
        for (const auto &r : c.records)
            gamma.rows.push_back({c.id, env_name(c.los), to_string(c.scheme), std::to_string(c.beams),
                                  std::to_string(r.seed), std::to_string(r.field), format_double(r.gamma)});
        if (c.records.empty())
            continue;
        const auto F = empirical_cdf(c.gammas());
        for (const auto &[v, f] : F.steps())
            cdf.rows.push_back({c.id, format_double(v), format_double(f)});
        summary.rows.push_back({c.id, std::to_string(F.size()), format_double(F(1.0)), format_double(1.0 - F(2.0)),
                                format_double(F.quantile(0.95)), format_double(F.max())});
    }
    return {{"gamma.csv", gamma.str()}, {"gamma_cdf.csv", cdf.str()}, {"gamma_summary.csv", summary.str()}};
}

OutputSet cmd_quant_sweep(const ExperimentConfig &cfg)
{
    const auto points = quant_sweep_campaign(cfg);
    CsvTable runs{{"experiment", "environment", "bits", "scheme", "seed", "tx_beam", "rx_beam", "snr_db"}, {}};
    CsvTable agg{{"experiment", "environment", "bits", "scheme", "aggregate_snr_db", "gap_to_nbf_db", "agreement"},
                 {}};

    struct Row
    {
        std::string id;
        std::uint64_t seed;
        std::vector<std::string> cells;
    };
    std::vector<Row> rows;
    for (const auto &p : points)
    {
        const std::string id = cfg.experiment + "/" + env_name(p.los) + "/bits" + bits_text(p.bits) + "/" +
                               to_string(p.scheme);
        for (std::size_t i = 0; i < p.snr_linear.size(); ++i)
            rows.push_back({id, p.seeds[i],
                            {id, env_name(p.los), bits_text(p.bits), to_string(p.scheme), std::to_string(p.seeds[i]),
                             std::to_string(p.pairs[i].first + 1), std::to_string(p.pairs[i].second + 1),
                             format_double(to_db(p.snr_linear[i]))}});

        const auto base = std::find_if(points.begin(), points.end(), [&](const QuantPoint &q) {
            return q.los == p.los && q.bits == p.bits && q.scheme == Scheme::exhaustive_pbp;
        });
        std::size_t agree = 0;
        for (std::size_t i = 0; i < p.pairs.size(); ++i)
            agree += p.pairs[i] == base->pairs[i];
        agg.rows.push_back({cfg.experiment, env_name(p.los), bits_text(p.bits), to_string(p.scheme),
                            format_double(p.aggregate_snr_db), format_double(base->aggregate_snr_db - p.aggregate_snr_db),
                            format_double(static_cast<double>(agree) / static_cast<double>(p.pairs.size()))});
    }
    std::stable_sort(rows.begin(), rows.end(),
                     [](const Row &a, const Row &b) { return std::tie(a.id, a.seed) < std::tie(b.id, b.seed); });
    for (auto &r : rows)
        runs.rows.push_back(std::move(r.cells));
    return {{"quant_runs.csv", runs.str()}, {"quant_sweep.csv", agg.str()}};
}

OutputSet cmd_overhead(const ExperimentConfig &cfg)
{
    CsvTable t{{"experiment", "beams", "scheme", "per_beam_bits", "training_bits", "saving_bits"}, {}};
    nlohmann::json layouts = nlohmann::json::array();
    const auto ad1 = per_beam_bits(LayoutScheme::ieee80211ad);
    const auto bc1 = per_beam_bits(LayoutScheme::beam_coding);
    for (const auto &r : overhead_table(cfg))
    {
        t.rows.push_back({cfg.experiment, std::to_string(r.beams), to_string(LayoutScheme::ieee80211ad),
                          std::to_string(ad1), std::to_string(r.bits_80211ad), "0"});
        t.rows.push_back({cfg.experiment, std::to_string(r.beams), to_string(LayoutScheme::beam_coding),
                          std::to_string(bc1), std::to_string(r.bits_beam_coding),
                          std::to_string(r.bits_80211ad - r.bits_beam_coding)});
        layouts.push_back(to_json(layout_80211ad(r.beams)));
        layouts.push_back(to_json(layout_beam_coding(r.beams)));
    }
    return {{"overhead.csv", t.str()}, {"layouts.json", layouts.dump(2) + "\n"}};
}

OutputSet cmd_train(const ExperimentConfig &cfg)
{
    cfg.validate();
    const auto tx = dft_codebook(ArrayConfig(cfg.tx_antennas, cfg.spacing));
    const auto rx = dft_codebook(ArrayConfig(cfg.rx_antennas, cfg.spacing));
    const auto seed = derive_seed(cfg.seed, 0);
    const auto ch = sample_channel(cfg.channel, seed);

    nlohmann::json doc;
    doc["experiment"] = cfg.experiment;
    doc["seed"] = seed;
    nlohmann::json rays = nlohmann::json::array();
    for (const auto &r : ch.rays)
        rays.push_back({{"aod_deg", r.aod_deg},
                        {"aoa_deg", r.aoa_deg},
                        {"gain_re", r.gain.real()},
                        {"gain_im", r.gain.imag()},
                        {"tap", r.tap}});
    doc["channel"] = {{"los", ch.los_present}, {"rays", rays}};

    CsvTable flat{{"experiment", "scheme", "seed", "detected", "tx_beam", "rx_beam", "packets", "training_bits",
                   "feedback_bits", "snr_db"},
                  {}};
    nlohmann::json outcomes = nlohmann::json::array();
    for (auto s : cfg.schemes)
    {
        ProtocolConfig pc(tx, rx, s);
        pc.budget = cfg.budget;
        pc.noiseless = cfg.noiseless;
        pc.num_sectors = cfg.num_sectors;
        pc.feedback_bits = cfg.feedback_bits;
        pc.record_traces = true;
        const auto out = run_training(pc, ch, seed);

        nlohmann::json stages = nlohmann::json::array();
        for (const auto &m : out.correlations)
        {
            nlohmann::json energy = nlohmann::json::array();
            for (std::size_t p = 0; p < m.rows(); ++p)
            {
                nlohmann::json row = nlohmann::json::array();
                for (std::size_t q = 0; q < m.cols(); ++q)
                    row.push_back(m.energy(p, q));
                energy.push_back(row);
            }
            stages.push_back({{"rows", m.rows()}, {"cols", m.cols()}, {"taps", m.taps()}, {"energy", energy}});
        }
        nlohmann::json traces = nlohmann::json::array();
        for (const auto &tr : out.power_traces)
            traces.push_back({{"preamble_power", tr.preamble_power}, {"trn_power", tr.trn_power}});
        outcomes.push_back({{"scheme", to_string(s)},
                            {"detected", out.detected},
                            {"best_pair", {out.best_pair.first + 1, out.best_pair.second + 1}},
                            {"packets_sent", out.packets_sent},
                            {"training_bits", out.training_bits},
                            {"feedback_bits", out.feedback_bits},
                            {"snr_db", out.detected ? nlohmann::json(out.snr_db) : nlohmann::json(nullptr)},
                            {"warnings", out.warnings},
                            {"stages", stages},
                            {"power_traces", traces}});
        flat.rows.push_back({cfg.experiment, to_string(s), std::to_string(seed), out.detected ? "1" : "0",
                             std::to_string(out.best_pair.first + 1), std::to_string(out.best_pair.second + 1),
                             std::to_string(out.packets_sent), std::to_string(out.training_bits),
                             std::to_string(out.feedback_bits), out.detected ? format_double(out.snr_db) : "nan"});
    }
    doc["outcomes"] = outcomes;
    return {{"train.json", doc.dump(2) + "\n"}, {"train.csv", flat.str()}};
}

void write_outputs(const OutputSet &files, const std::filesystem::path &dir)
{
    std::filesystem::create_directories(dir);
    for (const auto &[name, content] : files)
    {
        std::ofstream out(dir / name, std::ios::binary);
        if (!out)
            throw std::runtime_error("cannot write " + (dir / name).string());
        out << content;
    }
}

} // namespace beamcode
