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
#include "beamcode/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace beamcode
{

namespace
{
constexpr double two_pi = 2.0 * std::numbers::pi;

double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }

// Scan resolution for sidelobe detection; resolves N = 16 lobes with >= 40 samples each.
constexpr double sidelobe_grid_deg = 0.05;
constexpr double main_lobe_window_db = 3.0;
} // namespace

ArrayConfig::ArrayConfig(std::size_t num_antennas, double spacing)
    : num_antennas_(num_antennas), spacing_(spacing)
{
    if (num_antennas_ == 0)
        throw std::invalid_argument("ArrayConfig: num_antennas must be at least 1");
    if (!(spacing_ > 0.0) || !std::isfinite(spacing_))
        throw std::invalid_argument("ArrayConfig: spacing must be positive and finite");
}

double WeightVector::energy() const noexcept
{
    double e = 0.0;
    for (const auto &v : w_)
        e += std::norm(v);
    return e;
}

WeightVector WeightVector::scaled(cplx factor) const
{
    std::vector<cplx> out(w_);
    for (auto &v : out)
        v *= factor;
    return WeightVector(std::move(out));
}

SteeringVector steering_vector(const ArrayConfig &cfg, double angle_deg)
{
    if (!std::isfinite(angle_deg))
        throw std::invalid_argument("steering_vector: angle must be finite");
    if (angle_deg < 0.0 || angle_deg > 180.0)
        throw std::invalid_argument("steering_vector: angle " + std::to_string(angle_deg) +
                                    " deg outside [0, 180]");

    const std::size_t N = cfg.num_antennas();
    const double scale = 1.0 / std::sqrt(static_cast<double>(N));
    const double c = std::cos(deg2rad(angle_deg));
    std::vector<cplx> w(N);
    for (std::size_t n = 0; n < N; ++n)
        w[n] = std::polar(scale, -two_pi * static_cast<double>(n) * cfg.spacing() * c);

    return SteeringVector{angle_deg, angle_deg == 0.0 || angle_deg == 180.0, WeightVector(std::move(w))};
}

std::vector<cplx> array_response(const ArrayConfig &cfg, double angle_deg)
{
    const double c = std::cos(deg2rad(angle_deg));
    std::vector<cplx> a(cfg.num_antennas());
    for (std::size_t n = 0; n < a.size(); ++n)
        a[n] = std::polar(1.0, two_pi * static_cast<double>(n) * cfg.spacing() * c);
    return a;
}

cplx array_factor(const WeightVector &w, double angle_deg, const ArrayConfig &cfg)
{
    if (w.size() != cfg.num_antennas())
        throw dimension_error("array_factor: weight length " + std::to_string(w.size()) +
                              " does not match " + std::to_string(cfg.num_antennas()) + " antennas");
    const auto a = array_response(cfg, angle_deg);
    cplx x{};
    for (std::size_t n = 0; n < a.size(); ++n)
        x += w[n] * a[n];
    return x;
}

WeightVector superpose_beams(std::span<const SteeringVector> beams, std::span<const int> signs)
{
    if (beams.empty())
        throw std::invalid_argument("superpose_beams: no beams given");
    if (signs.size() != beams.size())
        throw dimension_error("superpose_beams: " + std::to_string(signs.size()) + " signs for " +
                              std::to_string(beams.size()) + " beams");

    const std::size_t N = beams.front().size();
    std::vector<cplx> w(N);
    for (std::size_t k = 0; k < beams.size(); ++k)
    {
        if (beams[k].size() != N)
            throw dimension_error("superpose_beams: steering vectors differ in length");
        if (signs[k] != 1 && signs[k] != -1)
            throw std::invalid_argument("superpose_beams: signs must be +1 or -1");
        const double s = static_cast<double>(signs[k]);
        for (std::size_t n = 0; n < N; ++n)
            w[n] += s * beams[k].weights[n];
    }
    const double norm = 1.0 / std::sqrt(static_cast<double>(beams.size()));
    for (auto &v : w)
        v *= norm;
    return WeightVector(std::move(w));
}

cplx inner_product(const WeightVector &a, const WeightVector &b)
{
    if (a.size() != b.size())
        throw dimension_error("inner_product: lengths differ");
    cplx s{};
    for (std::size_t n = 0; n < a.size(); ++n)
        s += a[n] * std::conj(b[n]);
    return s;
}

bool are_orthogonal(const SteeringVector &a, const SteeringVector &b, double tol)
{
    if (!(tol > 0.0))
        throw std::invalid_argument("are_orthogonal: tolerance must be positive");
    return std::abs(inner_product(a.weights, b.weights)) <= tol;
}

BeamCodebook::BeamCodebook(const ArrayConfig &cfg, const std::vector<double> &angles_deg, double ortho_tol)
    : cfg_(cfg), tol_(ortho_tol)
{
    beams_.reserve(angles_deg.size());
    for (double a : angles_deg)
        beams_.push_back(steering_vector(cfg, a));

    const std::size_t K = beams_.size();
    ortho_.assign(K * K, 0);
    for (std::size_t i = 0; i < K; ++i)
        for (std::size_t j = i + 1; j < K; ++j)
        {
            const char o = are_orthogonal(beams_[i], beams_[j], tol_) ? 1 : 0;
            ortho_[i * K + j] = o;
            ortho_[j * K + i] = o;
        }
}

std::vector<double> BeamCodebook::angles() const
{
    std::vector<double> out;
    out.reserve(beams_.size());
    for (const auto &b : beams_)
        out.push_back(b.angle_deg);
    return out;
}

bool BeamCodebook::orthogonal(std::size_t i, std::size_t j) const
{
    if (i >= size() || j >= size())
        throw std::out_of_range("BeamCodebook::orthogonal: index out of range");
    return ortho_[i * size() + j] != 0;
}

bool BeamCodebook::mutually_orthogonal() const noexcept
{
    const std::size_t K = size();
    for (std::size_t i = 0; i < K; ++i)
        for (std::size_t j = i + 1; j < K; ++j)
            if (!ortho_[i * K + j])
                return false;
    return true;
}

BeamCodebook BeamCodebook::subset(std::span<const std::size_t> indices) const
{
    std::vector<double> a;
    a.reserve(indices.size());
    for (auto i : indices)
        a.push_back(beam(i).angle_deg);
    return BeamCodebook(cfg_, a, tol_);
}

BeamCodebook dft_codebook(const ArrayConfig &cfg)
{
    const auto N = static_cast<long>(cfg.num_antennas());
    const long k0 = -(N / 2);
    const double denom = static_cast<double>(N) * cfg.spacing();

    std::vector<double> angles;
    angles.reserve(static_cast<std::size_t>(N));
    for (long k = k0; k < k0 + N; ++k)
    {
        const double c = static_cast<double>(k) / denom;
        if (c >= -1.0 && c <= 1.0)
            angles.push_back(std::acos(c) * 180.0 / std::numbers::pi);
    }
    if (angles.size() < static_cast<std::size_t>(N))
        throw capacity_error("dft_codebook: spacing " + std::to_string(cfg.spacing()) + " admits only " +
                                 std::to_string(angles.size()) + " of " + std::to_string(N) +
                                 " orthogonal beams at real angles",
                             angles.size());
    return BeamCodebook(cfg, angles);
}

WeightVector quantize_phases(const WeightVector &w, int bits)
{
    if (bits < 1)
        throw std::invalid_argument("quantize_phases: bits must be at least 1");
    if (bits > 52)
        return w; // finer than double resolution

    const double step = two_pi / std::ldexp(1.0, bits);
    std::vector<cplx> out(w.size());
    for (std::size_t n = 0; n < w.size(); ++n)
    {
        const double mag = std::abs(w[n]);
        if (mag == 0.0)
            continue;
        // ceil(x - 1/2) rounds to nearest and sends exact halves down
        const double level = std::ceil(std::arg(w[n]) / step - 0.5);
        out[n] = std::polar(mag, level * step);
    }
    return WeightVector(std::move(out));
}

WeightVector project_uniform(const WeightVector &w)
{
    const std::size_t N = w.size();
    if (N == 0)
        return w;
    double peak = 0.0;
    for (const auto &v : w)
        peak = std::max(peak, std::abs(v));

    const double mag = 1.0 / std::sqrt(static_cast<double>(N));
    const double floor_mag = 1e-9 * peak;
    std::vector<cplx> out(N);
    for (std::size_t n = 0; n < N; ++n)
        out[n] = std::abs(w[n]) <= floor_mag ? cplx(mag, 0.0) : std::polar(mag, std::arg(w[n]));
    return WeightVector(std::move(out));
}

std::vector<PatternSample> array_pattern(const WeightVector &w, const ArrayConfig &cfg, double step_deg)
{
    if (!(step_deg > 0.0) || step_deg >= 180.0)
        throw std::invalid_argument("array_pattern: step must lie in (0, 180)");
    if (w.size() != cfg.num_antennas())
        throw dimension_error("array_pattern: weight length does not match the array");

    const auto count = static_cast<std::size_t>(std::ceil(180.0 / step_deg)) - 1;
    std::vector<PatternSample> out;
    out.reserve(count);
    for (std::size_t i = 1; i <= count; ++i)
    {
        const double angle = static_cast<double>(i) * step_deg;
        if (angle >= 180.0)
            break;
        out.push_back({angle, std::norm(array_factor(w, angle, cfg))});
    }
    return out;
}

std::optional<double> sidelobe_level(const WeightVector &w, const ArrayConfig &cfg)
{
    const auto pattern = array_pattern(w, cfg, sidelobe_grid_deg);
    const std::size_t L = pattern.size();
    std::vector<double> p(L);
    for (std::size_t i = 0; i < L; ++i)
        p[i] = pattern[i].power;

    const double peak = *std::max_element(p.begin(), p.end());
    if (!(peak > 0.0))
        throw undefined_pattern_error("sidelobe_level: pattern is identically zero");

    // Three-point local maxima; a grid edge counts when it exceeds its single neighbour.
    std::vector<std::size_t> maxima;
    for (std::size_t i = 0; i < L; ++i)
    {
        const bool above_left = i == 0 || p[i] > p[i - 1];
        const bool above_right = i + 1 == L || p[i] >= p[i + 1];
        if (above_left && above_right)
            maxima.push_back(i);
    }

    const double main_floor = peak * std::pow(10.0, -main_lobe_window_db / 10.0);
    std::vector<char> in_main(L, 0);
    for (auto m : maxima)
    {
        if (p[m] < main_floor)
            continue;
        std::size_t lo = m;
        while (lo > 0 && p[lo - 1] <= p[lo])
            --lo;
        std::size_t hi = m;
        while (hi + 1 < L && p[hi + 1] <= p[hi])
            ++hi;
        std::fill(in_main.begin() + static_cast<std::ptrdiff_t>(lo),
                  in_main.begin() + static_cast<std::ptrdiff_t>(hi) + 1, 1);
    }

    double side = 0.0;
    bool found = false;
    for (auto m : maxima)
        if (!in_main[m] && p[m] > 0.0)
        {
            side = std::max(side, p[m]);
            found = true;
        }
    if (!found)
        return std::nullopt;
    return 10.0 * std::log10(side / peak);
}

WeightVector WeightRealization::apply(const WeightVector &w) const
{
    WeightVector out = uniform_magnitude ? project_uniform(w) : w;
    if (phase_bits)
        out = quantize_phases(out, *phase_bits);
    return out;
}

} // namespace beamcode
