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

#include "beamcode/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace beamcode
{

double preamble_variance(std::span<const cplx> preamble)
{
    if (preamble.empty())
        throw undefined_ratio_error("preamble_variance: empty preamble");
    cplx mean{};
    for (const auto &y : preamble)
        mean += y;
    mean /= static_cast<double>(preamble.size());
    double v = 0.0;
    for (const auto &y : preamble)
        v += std::norm(y - mean);
    return v / static_cast<double>(preamble.size());
}

std::vector<PowerRatioSample> power_ratio(std::span<const double> trace, std::span<const cplx> preamble,
                                          const std::string &scheme, std::uint64_t seed)
{
    const double sigma = preamble_variance(preamble);
    if (!(sigma > 0.0))
        throw undefined_ratio_error("power_ratio: preamble has zero variance");
    std::vector<PowerRatioSample> out;
    out.reserve(trace.size());
    for (std::size_t t = 0; t < trace.size(); ++t)
        out.push_back({trace[t] / (3.0 * sigma), scheme, seed, t});
    return out;
}

EmpiricalCdf::EmpiricalCdf(std::vector<double> samples) : sorted_(std::move(samples))
{
    if (sorted_.empty())
        throw std::invalid_argument("empirical_cdf: no samples");
    for (double v : sorted_)
        if (std::isnan(v))
            throw std::invalid_argument("empirical_cdf: NaN sample");
    std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalCdf::operator()(double x) const
{
    const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
    return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

std::vector<std::pair<double, double>> EmpiricalCdf::steps() const
{
    std::vector<std::pair<double, double>> out;
    const double n = static_cast<double>(sorted_.size());
    for (std::size_t i = 0; i < sorted_.size(); ++i)
        if (i + 1 == sorted_.size() || sorted_[i + 1] != sorted_[i])
            out.emplace_back(sorted_[i], static_cast<double>(i + 1) / n);
    return out;
}

double EmpiricalCdf::quantile(double p) const
{
    if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument("EmpiricalCdf::quantile: p outside [0, 1]");
    // smallest x with F(x) >= p
    const auto n = sorted_.size();
    auto k = static_cast<std::size_t>(std::ceil(p * static_cast<double>(n)));
    k = std::clamp<std::size_t>(k, 1, n);
    return sorted_[k - 1];
}

EmpiricalCdf empirical_cdf(std::vector<double> samples) { return EmpiricalCdf(std::move(samples)); }

double aggregate_snr(std::span<const double> per_run_snr)
{
    if (per_run_snr.empty())
        throw std::invalid_argument("aggregate_snr: no runs");
    double acc = 0.0;
    for (double s : per_run_snr)
    {
        if (!(s >= 0.0))
            throw std::invalid_argument("aggregate_snr: negative or NaN SNR");
        acc += std::log2(1.0 + s);
    }
    return std::exp2(acc / static_cast<double>(per_run_snr.size())) - 1.0;
}

double to_db(double linear) { return 10.0 * std::log10(linear); }
double from_db(double db) { return std::pow(10.0, db / 10.0); }

} // namespace beamcode
