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
//
// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "beamcode/array_model.hpp"
#include "beamcode/beam_coding.hpp"
#include "beamcode/channel.hpp"
#include "beamcode/harness.hpp"
#include "beamcode/metrics.hpp"
#include "beamcode/packets.hpp"
#include "beamcode/protocols.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

using namespace beamcode;

namespace
{
struct Verdict
{
    bool pass = false;
    std::string detail;
};

int failures = 0;

void criterion(int id, const char *name, double budget_s, const std::function<Verdict()> &body)
{
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try
    {
        v = body();
    }
    catch (const std::exception &e)
    {
        v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::ostringstream extra;
    if (secs > budget_s)
    {
        v.pass = false;
        extra << "; over time budget " << budget_s << " s";
    }
    std::printf("criterion %d %s: %s | %s%s | %.2f s\n", id, name, v.pass ? "PASS" : "FAIL", v.detail.c_str(),
                extra.str().c_str(), secs);
    std::fflush(stdout);
    if (!v.pass)
        ++failures;
}

std::string fmt(const char *f, double a, double b = 0.0, double c = 0.0, double d = 0.0)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

ExperimentConfig campaign_config()
{
    ExperimentConfig cfg;
    cfg.experiment = "acceptance";
    cfg.runs = 1000;
    cfg.seed = 1;
    return cfg;
}

const PowerVarCell &find_cell(const std::vector<PowerVarCell> &cells, bool los, LayoutScheme s, std::size_t k)
{
    for (const auto &c : cells)
        if (c.los == los && c.scheme == s && c.beams == k)
            return c;
    throw std::runtime_error("missing power-var cell");
}
} // namespace

int main()
{
    criterion(1, "toy-channel exactness", 1.0, [] {
        const auto cb = dft_codebook(toy_array());
        const auto ch = toy_channel(0.5);
        const auto ex = run_exhaustive_beamcoding(ProtocolConfig(cb, cb, Scheme::exhaustive_beamcoding), ch, 1);
        const auto fb = run_feedback_beamcoding(ProtocolConfig(cb, cb, Scheme::feedback_beamcoding), ch, 1);
        const auto &r = ex.correlations.at(0);
        const cplx r23 = r.at(1, 2, 0), r14 = r.at(0, 3, 0);
        const bool ok = std::abs(r23 - cplx(2.0)) < 1e-9 && std::abs(r14 - cplx(1.0)) < 1e-9 &&
                        ex.best_pair == std::pair<std::size_t, std::size_t>{1, 2} && ex.packets_sent == 4 &&
                        fb.best_pair == ex.best_pair && fb.packets_sent == 2;
        return Verdict{ok, fmt("r(2,3)=%.12g r(1,4)=%.12g", r23.real(), r14.real()) + " best=(" +
                               std::to_string(ex.best_pair.first + 1) + "," + std::to_string(ex.best_pair.second + 1) +
                               ") packets=" + std::to_string(ex.packets_sent) + "; feedback best=(" +
                               std::to_string(fb.best_pair.first + 1) + "," + std::to_string(fb.best_pair.second + 1) +
                               ") packets=" + std::to_string(fb.packets_sent)};
    });

    criterion(2, "power flatness", 10.0, [] {
        const ArrayConfig arr(16);
        const auto cb = dft_codebook(arr);
        double worst = 0.0;
        std::size_t checked = 0;
        std::mt19937_64 rng(2);
        std::bernoulli_distribution coin(0.5);
        for (std::size_t K : {2u, 4u, 8u, 16u})
            for (const auto &group : coding_groups(16, K))
            {
                const auto sub = cb.subset(group);
                const std::vector<SteeringVector> beams(sub.beams().begin(), sub.beams().end());
                std::vector<int> s(K);
                auto probe = [&] {
                    auto w = superpose_beams(beams, s);
                    worst = std::max(worst, std::abs(w.energy() - 1.0));
                    ++checked;
                };
                if (K <= 8)
                    for (std::size_t m = 0; m < (std::size_t{1} << K); ++m)
                    {
                        for (std::size_t k = 0; k < K; ++k)
                            s[k] = (m >> k) & 1 ? -1 : 1;
                        probe();
                    }
                else
                    for (int i = 0; i < 10000; ++i)
                    {
                        for (auto &x : s)
                            x = coin(rng) ? -1 : 1;
                        probe();
                    }
            }
        return Verdict{worst < 1e-12, fmt("max ||w|^2-1| = %.3g over %.0f sign rows", worst, double(checked))};
    });

    criterion(3, "power-ratio separation", 300.0, [] {
        const auto cells = power_var_campaign(campaign_config());
        double bc_cdf1 = 1.0;
        for (std::size_t k : {1u, 2u, 4u, 8u, 16u})
        {
            const auto F = empirical_cdf(find_cell(cells, false, LayoutScheme::beam_coding, k).gammas());
            bc_cdf1 = std::min(bc_cdf1, F(1.0));
        }
        const auto ad_nlos = empirical_cdf(find_cell(cells, false, LayoutScheme::ieee80211ad, 16).gammas());
        const auto ad_los = empirical_cdf(find_cell(cells, true, LayoutScheme::ieee80211ad, 16).gammas());
        const double above2 = 1.0 - ad_nlos(2.0);
        const bool ok = bc_cdf1 >= 0.99 && above2 >= 0.05 && ad_los.max() >= 8.0;
        return Verdict{ok, fmt("NLOS beam coding min CDF(1)=%.4f (>=0.99); NLOS 802.11ad K16 P(gamma>2)=%.4f (>=0.05); "
                               "LOS 802.11ad K16 max gamma=%.2f (>=8)",
                               bc_cdf1, above2, ad_los.max())};
    });

    criterion(4, "sidelobe levels", 1.0, [] {
        const ArrayConfig arr(16);
        PatternConfig single;
        PatternConfig dual;
        dual.beams = 2;
        dual.uniform = true;
        const auto s1 = sidelobe_level(pattern_weights(single, 0.5), arr);
        const auto s2 = sidelobe_level(pattern_weights(dual, 0.5), arr);
        const bool ok = s1 && s2 && std::abs(*s1 + 13.2) <= 0.5 && std::abs(*s2 + 9.0) <= 1.0;
        return Verdict{ok, fmt("single beam %.3f dB (-13.2 +/- 0.5); two-beam phase-only %.3f dB (-9 +/- 1)",
                               s1.value_or(NAN), s2.value_or(NAN))};
    });

    criterion(5, "noiseless oracle equivalence", 120.0, [] {
        const auto cb = dft_codebook(ArrayConfig(16));
        const ProtocolConfig bc(cb, cb, Scheme::exhaustive_beamcoding);
        const ProtocolConfig pbp(cb, cb, Scheme::exhaustive_pbp);
        std::size_t agree = 0, total = 0;
        for (bool los : {true, false})
        {
            ChannelConfig cc;
            cc.los = los;
            for (std::uint64_t i = 0; i < 500; ++i)
            {
                const auto seed = derive_seed(5, i);
                const auto ch = sample_channel(cc, seed);
                agree += run_exhaustive_beamcoding(bc, ch, seed).best_pair == run_exhaustive_pbp(pbp, ch, seed).best_pair;
                ++total;
            }
        }
        return Verdict{agree == total, fmt("%.0f / %.0f channels agree (500 LOS + 500 NLOS)", double(agree),
                                           double(total))};
    });

    criterion(6, "quantization convergence", 600.0, [] {
        auto cfg = campaign_config();
        cfg.environments = {false};
        cfg.quant_bits = {2, 3, 4};
        const auto pts = quant_sweep_campaign(cfg);
        auto gap = [&](int bits) {
            double nbf = NAN, bc = NAN;
            for (const auto &p : pts)
                if (p.bits == bits)
                    (p.scheme == Scheme::exhaustive_pbp ? nbf : bc) = p.aggregate_snr_db;
            return nbf - bc;
        };
        const double g2 = gap(2), g3 = gap(3), g4 = gap(4);
        const bool ok = std::abs(g3) <= 0.1 && std::abs(g4) <= 0.1 && std::abs(g2) <= 1.0;
        return Verdict{ok, fmt("NLOS gap to N-BF: 2-bit %.4f dB (<=1), 3-bit %.4f dB (<=0.1), 4-bit %.4f dB (<=0.1)",
                               g2, g3, g4)};
    });

    criterion(7, "overhead arithmetic", 1.0, [] {
        const auto ad = per_beam_bits(LayoutScheme::ieee80211ad);
        const auto bc = per_beam_bits(LayoutScheme::beam_coding);
        const auto ad16 = layout_80211ad(16).training_bits();
        const auto bc16 = layout_beam_coding(16, 16).training_bits();
        const bool ok = ad == 4864 && bc == 1024 && ad - bc == 3840 && ad16 == 77824 && bc16 == 16384;
        return Verdict{ok, fmt("per beam %.0f vs %.0f, saving %.0f; K=16 totals %.0f", double(ad), double(bc),
                               double(ad - bc), double(ad16)) +
                               " vs " + std::to_string(bc16)};
    });

    criterion(8, "determinism", 300.0, [] {
        auto cfg = campaign_config();
        cfg.runs = 25;
        cfg.quant_bits = {2, std::nullopt};
        bool ok = true;
        std::size_t files = 0;
        for (auto cmd : {cmd_pattern, cmd_power_var, cmd_quant_sweep, cmd_overhead, cmd_train})
        {
            auto a = cfg, b = cfg;
            a.threads = 1;
            b.threads = 4;
            const auto x = cmd(a), y = cmd(b), z = cmd(a);
            ok = ok && x == y && x == z;
            files += x.size();
        }
        return Verdict{ok, fmt("%.0f output files byte-identical across reruns and thread counts", double(files))};
    });

    criterion(9, "multilevel NLOS failure", 10.0, [] {
        const auto cb = dft_codebook(ArrayConfig(16));
        const auto ch = sector_boundary_channel();
        const auto ex = run_exhaustive_pbp(ProtocolConfig(cb, cb, Scheme::exhaustive_pbp), ch, 1);
        const auto ml = run_multilevel_pbp(ProtocolConfig(cb, cb, Scheme::multilevel_pbp), ch, 1);
        const auto bc = run_exhaustive_beamcoding(ProtocolConfig(cb, cb, Scheme::exhaustive_beamcoding), ch, 1);
        const double loss = ex.snr_db - ml.snr_db;
        const bool ok = loss >= 3.0 && bc.best_pair == ex.best_pair;
        return Verdict{ok, fmt("exhaustive (%.0f,%.0f) ", double(ex.best_pair.first + 1),
                               double(ex.best_pair.second + 1)) +
                               fmt("multilevel (%.0f,%.0f) loses %.2f dB (>=3); ", double(ml.best_pair.first + 1),
                                   double(ml.best_pair.second + 1), loss) +
                               fmt("beam coding (%.0f,%.0f)", double(bc.best_pair.first + 1),
                                   double(bc.best_pair.second + 1))};
    });

    std::printf("%s: %d criteria failed\n", failures ? "FAIL" : "PASS", failures);
    return failures ? 1 : 0;
}
