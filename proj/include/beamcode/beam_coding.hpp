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

#ifndef BEAMCODE_BEAM_CODING_HPP
#define BEAMCODE_BEAM_CODING_HPP

#include "beamcode/array_model.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace beamcode
{

// +/-1 chip sequence tagging one beam; one chip per CE field.
struct SignatureCode
{
    std::vector<int> chips;
    std::size_t beam_index = 0;

    std::size_t length() const noexcept { return chips.size(); }
};

// Sylvester-Hadamard rows of order 2^order_log2, in natural order. Row p tags beam p.
std::vector<SignatureCode> walsh_codes(unsigned order_log2);

// First `count` rows of the smallest Walsh order T >= count.
std::vector<SignatureCode> walsh_codes_for(std::size_t count);

// Codes for simultaneous Tx/Rx coding: pair (p, q) gets s_p (x) s_q, stored at p * Q + q.
// Extension used when both ends code at once.
std::vector<SignatureCode> kronecker_codes(std::span<const SignatureCode> tx, std::span<const SignatureCode> rx);

std::size_t next_power_of_two(std::size_t n);

struct GolayPair
{
    std::vector<int> a;
    std::vector<int> b;

    std::size_t length() const noexcept { return a.size(); }
};

// a' = a | b, b' = a | -b from a = b = [1]; length 2^length_log2.
GolayPair golay_pair(unsigned length_log2);

// 512-chip sequences, so one a + b pair is the 1024-chip CE field.
inline constexpr unsigned default_ce_length_log2 = 9;

/*!MD
# CodedWeightSchedule
Transmit weights for each CE field of a beam-coded training section:

    w[t] = (1/sqrt(K)) * sum_p codes[p][t] * beta(phi_p)

For mutually orthogonal beams every `w[t]` has unit energy regardless of the code chips. A
non-orthogonal beam set still decodes, but the field energies fluctuate; `warning` says so.
MD!*/
struct CodedWeightSchedule
{
    std::vector<WeightVector> fields;
    BeamCodebook beams;
    std::vector<SignatureCode> codes;
    std::optional<std::string> warning;

    std::size_t num_fields() const noexcept { return fields.size(); }
    std::size_t num_beams() const noexcept { return codes.size(); }
    // Gain of decoded correlations over the per-beam channel: T / sqrt(K).
    double correlation_scale() const;
};

CodedWeightSchedule build_schedule(const BeamCodebook &beams, std::vector<SignatureCode> codes);

// P x Q x taps complex table with (p, q) the Tx/Rx beam pair.
class CorrelationMatrix
{
public:
    CorrelationMatrix() = default;
    CorrelationMatrix(std::size_t rows, std::size_t cols, std::size_t taps = 1);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t taps() const noexcept { return taps_; }

    cplx &at(std::size_t p, std::size_t q, std::size_t tap = 0);
    const cplx &at(std::size_t p, std::size_t q, std::size_t tap = 0) const;

    // sum over taps of |r(p, q, tap)|^2
    double energy(std::size_t p, std::size_t q) const;
    double peak_magnitude() const;

    // Largest energy; ties go to the lexicographically smallest (p, q).
    std::pair<std::size_t, std::size_t> argmax() const;

private:
    std::size_t rows_ = 0, cols_ = 0, taps_ = 0;
    std::vector<cplx> r_;
};

// r(p, q) = sum_t codes[p][t] * received[q][t]; received is Q rows of T field values.
CorrelationMatrix decode_correlations(const std::vector<std::vector<cplx>> &received,
                                      std::span<const SignatureCode> codes);

/*!MD
# CE field waveform
A CE field is `a | 0^G | b | 0^G` with `G = num_taps - 1` guard chips, so the linear channel
tail of each half stays inside its own correlation window. Correlating both halves and summing
gives `2L * h[d]` for every lag `d < num_taps`, exactly, because the aperiodic autocorrelations
of a Golay pair cancel off zero lag. Noise stays white across lags for the same reason.
MD!*/
std::vector<cplx> ce_field_chips(const GolayPair &golay, std::size_t num_taps);

// Received CE field for a tap-delay channel (linear convolution, same length as the chips).
std::vector<cplx> synthesize_ce_field(const GolayPair &golay, std::span<const cplx> taps, std::size_t num_taps);

// Golay correlation of one received field, normalized to the per-tap channel: h_hat[d], d < num_taps.
std::vector<cplx> estimate_taps(std::span<const cplx> field, const GolayPair &golay, std::size_t num_taps);

// Golay correlation per field, then Walsh decoding per tap. Returns P x 1 x num_taps.
CorrelationMatrix decode_per_tap(std::span<const std::vector<cplx>> received_fields, const GolayPair &golay,
                                 std::span<const SignatureCode> codes, std::size_t num_taps);

} // namespace beamcode

#endif
