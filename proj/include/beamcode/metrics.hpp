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

#ifndef BEAMCODE_METRICS_HPP
#define BEAMCODE_METRICS_HPP

#include "beamcode/array_model.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace beamcode
{

// Preamble without variance: the AGC reference, and hence gamma, is undefined.
class undefined_ratio_error : public std::domain_error
{
public:
    using std::domain_error::domain_error;
};

struct PowerRatioSample
{
    double gamma = 0.0;
    std::string scheme;
    std::uint64_t seed = 0;
    std::size_t field_index = 0;
};

// Population variance of the samples around their complex mean: mean |y - mean(y)|^2.
double preamble_variance(std::span<const cplx> preamble);

// gamma_t = trace[t] / (3 sigma_prem), one sample per TRN field.
std::vector<PowerRatioSample> power_ratio(std::span<const double> trace, std::span<const cplx> preamble,
                                          const std::string &scheme = {}, std::uint64_t seed = 0);

// Right-continuous empirical CDF: F(x) = #{samples <= x} / n.
class EmpiricalCdf
{
public:
    explicit EmpiricalCdf(std::vector<double> samples);

    double operator()(double x) const;
    std::size_t size() const noexcept { return sorted_.size(); }
    // (value, cumulative fraction) at each distinct sample value.
    std::vector<std::pair<double, double>> steps() const;
    double quantile(double p) const;
    double min() const { return sorted_.front(); }
    double max() const { return sorted_.back(); }

private:
    std::vector<double> sorted_;
};

EmpiricalCdf empirical_cdf(std::vector<double> samples);

// 2^(mean log2(1 + snr_i)) - 1. Throws on an empty list or negative entries.
double aggregate_snr(std::span<const double> per_run_snr);

double to_db(double linear);
double from_db(double db);

} // namespace beamcode

#endif
