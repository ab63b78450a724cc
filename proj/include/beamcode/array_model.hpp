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

#ifndef BEAMCODE_ARRAY_MODEL_HPP
#define BEAMCODE_ARRAY_MODEL_HPP

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace beamcode
{

using cplx = std::complex<double>;

/*!MD
# Uniform linear array model

Angles are in degrees and measured from the array axis, so broadside is 90 deg and the
visible region is [0, 180]. Antenna `n` (0-based) sits at `n * spacing` wavelengths.

- Steering weights: `beta_n(phi) = exp(-j 2 pi n spacing cos(phi)) / sqrt(N)`, unit L2 norm.
- Array factor: `x(phi) = sum_n w_n exp(+j 2 pi n spacing cos(phi))`.

With these signs the steering weights conjugate-match the propagation phase. A normalized
steering vector therefore yields `|x(phi)| = sqrt(N)` at its own angle; scale the weights by
`sqrt(N)` to recover the unnormalized form with peak `N`.
MD!*/

// Array geometry. Spacing is the element distance over the wavelength.
class ArrayConfig
{
public:
    explicit ArrayConfig(std::size_t num_antennas, double spacing = 0.5);

    std::size_t num_antennas() const noexcept { return num_antennas_; }
    double spacing() const noexcept { return spacing_; }

    friend bool operator==(const ArrayConfig &, const ArrayConfig &) = default;

private:
    std::size_t num_antennas_;
    double spacing_;
};

// Per-antenna complex weights applied at RF.
class WeightVector
{
public:
    WeightVector() = default;
    explicit WeightVector(std::vector<cplx> weights) : w_(std::move(weights)) {}
    static WeightVector zeros(std::size_t n) { return WeightVector(std::vector<cplx>(n)); }

    std::size_t size() const noexcept { return w_.size(); }
    const cplx &operator[](std::size_t n) const { return w_[n]; }
    std::span<const cplx> values() const noexcept { return w_; }
    auto begin() const noexcept { return w_.begin(); }
    auto end() const noexcept { return w_.end(); }

    // |w|^2 = sum_n w_n conj(w_n)
    double energy() const noexcept;

    WeightVector scaled(cplx factor) const;

private:
    std::vector<cplx> w_;
};

struct SteeringVector
{
    double angle_deg = 90.0;
    bool endfire = false; // angle is exactly 0 or 180 deg
    WeightVector weights;

    std::size_t size() const noexcept { return weights.size(); }
};

// Ordered set of beams plus the pairwise orthogonality flags.
class BeamCodebook
{
public:
    BeamCodebook(const ArrayConfig &cfg, const std::vector<double> &angles_deg, double ortho_tol = 1e-9);

    const ArrayConfig &config() const noexcept { return cfg_; }
    std::size_t size() const noexcept { return beams_.size(); }
    const SteeringVector &beam(std::size_t i) const { return beams_.at(i); }
    std::span<const SteeringVector> beams() const noexcept { return beams_; }
    std::vector<double> angles() const;

    bool orthogonal(std::size_t i, std::size_t j) const;
    bool mutually_orthogonal() const noexcept;

    BeamCodebook subset(std::span<const std::size_t> indices) const;

private:
    ArrayConfig cfg_;
    double tol_;
    std::vector<SteeringVector> beams_;
    std::vector<char> ortho_; // row-major size() x size(); diagonal is false
};

SteeringVector steering_vector(const ArrayConfig &cfg, double angle_deg);

// Per-antenna propagation phasors exp(+j 2 pi n spacing cos(phi)) for a plane wave at angle_deg.
std::vector<cplx> array_response(const ArrayConfig &cfg, double angle_deg);

cplx array_factor(const WeightVector &w, double angle_deg, const ArrayConfig &cfg);

// w = (1/sqrt(K)) sum_k signs[k] * beta(phi_k); signs must be +1 or -1.
WeightVector superpose_beams(std::span<const SteeringVector> beams, std::span<const int> signs);

// sum_n a_n conj(b_n)
cplx inner_product(const WeightVector &a, const WeightVector &b);

bool are_orthogonal(const SteeringVector &a, const SteeringVector &b, double tol = 1e-9);

/*!MD
# dft_codebook
N beams on the DFT grid `cos(phi_k) = k / (N * spacing)` for `k = -floor(N/2) .. N - 1 - floor(N/2)`,
ordered by increasing `k` (decreasing angle). Every pair is orthogonal. Throws `capacity_error`
carrying the number of real angles when `spacing < 0.5` pushes some grid points outside
`|cos(phi)| <= 1`.
MD!*/
BeamCodebook dft_codebook(const ArrayConfig &cfg);

// Snap each phase to the nearest multiple of 2 pi / 2^bits. Exact midpoints go to the lower level.
WeightVector quantize_phases(const WeightVector &w, int bits);

// Phase-only projection: every entry becomes exp(j arg(w_n)) / sqrt(N). Entries with magnitude at
// or below 1e-9 of the largest entry have no meaningful phase and are assigned phase 0.
WeightVector project_uniform(const WeightVector &w);

// Power of the largest lobe outside all main lobes, relative to the main-lobe peak, in dB.
// Main lobes are the local maxima within 3 dB of the global peak, extended to their nulls.
// Returns nullopt when no secondary lobe exists.
std::optional<double> sidelobe_level(const WeightVector &w, const ArrayConfig &cfg);

struct PatternSample
{
    double angle_deg;
    double power; // |x(phi)|^2
};

// |x(phi)|^2 on the open grid step, 2 step, ... < 180.
std::vector<PatternSample> array_pattern(const WeightVector &w, const ArrayConfig &cfg, double step_deg);

// Hardware constraints applied to every weight vector a device programs.
struct WeightRealization
{
    std::optional<int> phase_bits; // nullopt means ideal phase shifters
    bool uniform_magnitude = false; // phase-only array

    WeightVector apply(const WeightVector &w) const;
    bool ideal() const noexcept { return !phase_bits && !uniform_magnitude; }
};

} // namespace beamcode

#endif
