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

#include "beamcode/beam_coding.hpp"
#include "beamcode/errors.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace beamcode
{

std::size_t next_power_of_two(std::size_t n)
{
    std::size_t t = 1;
    while (t < n)
        t <<= 1;
    return t;
}

std::vector<SignatureCode> walsh_codes(unsigned order_log2)
{
    if (order_log2 > 20)
        throw std::invalid_argument("walsh_codes: order too large");
    const std::size_t T = std::size_t{1} << order_log2;

    // H_{2m} = [H H; H -H]
    std::vector<std::vector<int>> H{{1}};
    for (std::size_t m = 1; m < T; m <<= 1)
    {
        std::vector<std::vector<int>> next(2 * m, std::vector<int>(2 * m));
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j)
            {
                next[i][j] = H[i][j];
                next[i][j + m] = H[i][j];
                next[i + m][j] = H[i][j];
                next[i + m][j + m] = -H[i][j];
            }
        H = std::move(next);
    }

    std::vector<SignatureCode> codes;
    codes.reserve(T);
    for (std::size_t p = 0; p < T; ++p)
        codes.push_back({std::move(H[p]), p});
    return codes;
}

std::vector<SignatureCode> walsh_codes_for(std::size_t count)
{
    if (count == 0)
        throw std::invalid_argument("walsh_codes_for: need at least one code");
    const std::size_t T = next_power_of_two(count);
    unsigned k = 0;
    while ((std::size_t{1} << k) < T)
        ++k;
    auto codes = walsh_codes(k);
    codes.resize(count);
    return codes;
}

std::vector<SignatureCode> kronecker_codes(std::span<const SignatureCode> tx, std::span<const SignatureCode> rx)
{
    std::vector<SignatureCode> out;
    out.reserve(tx.size() * rx.size());
    for (std::size_t p = 0; p < tx.size(); ++p)
        for (std::size_t q = 0; q < rx.size(); ++q)
        {
            std::vector<int> chips;
            chips.reserve(tx[p].length() * rx[q].length());
            for (int a : tx[p].chips)
                for (int b : rx[q].chips)
                    chips.push_back(a * b);
            out.push_back({std::move(chips), p * rx.size() + q});
        }
    return out;
}

GolayPair golay_pair(unsigned length_log2)
{
    if (length_log2 > 24)
        throw std::invalid_argument("golay_pair: length too large");
    GolayPair g{{1}, {1}};
    for (unsigned i = 0; i < length_log2; ++i)
    {
        std::vector<int> a2(g.a);
        a2.insert(a2.end(), g.b.begin(), g.b.end());
        std::vector<int> b2(g.a);
        for (int v : g.b)
            b2.push_back(-v);
        g.a = std::move(a2);
        g.b = std::move(b2);
    }
    return g;
}

double CodedWeightSchedule::correlation_scale() const
{
    return static_cast<double>(num_fields()) / std::sqrt(static_cast<double>(num_beams()));
}

CodedWeightSchedule build_schedule(const BeamCodebook &beams, std::vector<SignatureCode> codes)
{
    const std::size_t K = beams.size();
    if (K == 0)
        throw std::invalid_argument("build_schedule: empty beam set");
    if (codes.size() != K)
        throw dimension_error("build_schedule: " + std::to_string(codes.size()) + " codes for " +
                              std::to_string(K) + " beams");
    const std::size_t T = codes.front().length();
    if (T < K)
        throw dimension_error("build_schedule: code length " + std::to_string(T) + " shorter than beam count " +
                              std::to_string(K));
    for (const auto &c : codes)
    {
        if (c.length() != T)
            throw dimension_error("build_schedule: codes differ in length");
        for (int chip : c.chips)
            if (chip != 1 && chip != -1)
                throw std::invalid_argument("build_schedule: chips must be +1 or -1");
    }

    CodedWeightSchedule s{{}, beams, std::move(codes), std::nullopt};
    if (!beams.mutually_orthogonal())
        s.warning = "beam set is not mutually orthogonal; field power will vary with the code chips";

    std::vector<int> signs(K);
    s.fields.reserve(T);
    for (std::size_t t = 0; t < T; ++t)
    {
        for (std::size_t p = 0; p < K; ++p)
            signs[p] = s.codes[p].chips[t];
        s.fields.push_back(superpose_beams(beams.beams(), signs));
    }
    return s;
}

CorrelationMatrix::CorrelationMatrix(std::size_t rows, std::size_t cols, std::size_t taps)
    : rows_(rows), cols_(cols), taps_(taps), r_(rows * cols * taps)
{
}

cplx &CorrelationMatrix::at(std::size_t p, std::size_t q, std::size_t tap)
{
    if (p >= rows_ || q >= cols_ || tap >= taps_)
        throw std::out_of_range("CorrelationMatrix::at");
    return r_[(p * cols_ + q) * taps_ + tap];
}

const cplx &CorrelationMatrix::at(std::size_t p, std::size_t q, std::size_t tap) const
{
    if (p >= rows_ || q >= cols_ || tap >= taps_)
        throw std::out_of_range("CorrelationMatrix::at");
    return r_[(p * cols_ + q) * taps_ + tap];
}

double CorrelationMatrix::energy(std::size_t p, std::size_t q) const
{
    double e = 0.0;
    for (std::size_t d = 0; d < taps_; ++d)
        e += std::norm(at(p, q, d));
    return e;
}

double CorrelationMatrix::peak_magnitude() const
{
    double m = 0.0;
    for (const auto &v : r_)
        m = std::max(m, std::abs(v));
    return m;
}

std::pair<std::size_t, std::size_t> CorrelationMatrix::argmax() const
{
    if (rows_ == 0 || cols_ == 0)
        throw std::logic_error("CorrelationMatrix::argmax on empty matrix");
    std::pair<std::size_t, std::size_t> best{0, 0};
    double best_e = energy(0, 0);
    for (std::size_t p = 0; p < rows_; ++p)
        for (std::size_t q = 0; q < cols_; ++q)
        {
            const double e = energy(p, q);
            if (e > best_e)
            {
                best_e = e;
                best = {p, q};
            }
        }
    return best;
}

CorrelationMatrix decode_correlations(const std::vector<std::vector<cplx>> &received,
                                      std::span<const SignatureCode> codes)
{
    const std::size_t Q = received.size();
    const std::size_t P = codes.size();
    CorrelationMatrix r(P, Q, 1);
    for (std::size_t q = 0; q < Q; ++q)
    {
        const auto &y = received[q];
        for (std::size_t p = 0; p < P; ++p)
        {
            if (codes[p].length() != y.size())
                throw dimension_error("decode_correlations: code length " + std::to_string(codes[p].length()) +
                                      " does not match " + std::to_string(y.size()) + " fields");
            cplx acc{};
            for (std::size_t t = 0; t < y.size(); ++t)
                acc += static_cast<double>(codes[p].chips[t]) * y[t];
            r.at(p, q) = acc;
        }
    }
    return r;
}

std::vector<cplx> ce_field_chips(const GolayPair &golay, std::size_t num_taps)
{
    if (num_taps == 0)
        throw std::invalid_argument("ce_field_chips: num_taps must be at least 1");
    const std::size_t L = golay.length();
    const std::size_t G = num_taps - 1;
    std::vector<cplx> x(2 * (L + G));
    for (std::size_t n = 0; n < L; ++n)
    {
        x[n] = static_cast<double>(golay.a[n]);
        x[L + G + n] = static_cast<double>(golay.b[n]);
    }
    return x;
}

std::vector<cplx> synthesize_ce_field(const GolayPair &golay, std::span<const cplx> taps, std::size_t num_taps)
{
    if (taps.size() > num_taps)
        throw dimension_error("synthesize_ce_field: channel longer than the guard interval");
    const auto x = ce_field_chips(golay, num_taps);
    std::vector<cplx> y(x.size());
    for (std::size_t n = 0; n < y.size(); ++n)
        for (std::size_t d = 0; d < taps.size() && d <= n; ++d)
            y[n] += taps[d] * x[n - d];
    return y;
}

std::vector<cplx> estimate_taps(std::span<const cplx> field, const GolayPair &golay, std::size_t num_taps)
{
    if (num_taps == 0)
        throw std::invalid_argument("estimate_taps: num_taps must be at least 1");
    const std::size_t L = golay.length();
    const std::size_t G = num_taps - 1;
    if (field.size() < 2 * (L + G))
        throw dimension_error("estimate_taps: field of " + std::to_string(field.size()) +
                              " samples is shorter than the " + std::to_string(2 * (L + G)) + "-chip CE field");

    const double norm = 1.0 / (2.0 * static_cast<double>(L));
    std::vector<cplx> h(num_taps);
    for (std::size_t d = 0; d < num_taps; ++d)
    {
        cplx acc{};
        for (std::size_t n = 0; n < L; ++n)
        {
            acc += static_cast<double>(golay.a[n]) * field[n + d];
            acc += static_cast<double>(golay.b[n]) * field[L + G + n + d];
        }
        h[d] = acc * norm;
    }
    return h;
}

CorrelationMatrix decode_per_tap(std::span<const std::vector<cplx>> received_fields, const GolayPair &golay,
                                 std::span<const SignatureCode> codes, std::size_t num_taps)
{
    const std::size_t T = received_fields.size();
    std::vector<std::vector<cplx>> h(T);
    for (std::size_t t = 0; t < T; ++t)
        h[t] = estimate_taps(received_fields[t], golay, num_taps);

    CorrelationMatrix r(codes.size(), 1, num_taps);
    for (std::size_t p = 0; p < codes.size(); ++p)
    {
        if (codes[p].length() != T)
            throw dimension_error("decode_per_tap: code length does not match the field count");
        for (std::size_t d = 0; d < num_taps; ++d)
        {
            cplx acc{};
            for (std::size_t t = 0; t < T; ++t)
                acc += static_cast<double>(codes[p].chips[t]) * h[t][d];
            r.at(p, 0, d) = acc;
        }
    }
    return r;
}

} // namespace beamcode
