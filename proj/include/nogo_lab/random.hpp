// Copyright 2026 The nogo-lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

#include "nogo_lab/opcore.hpp"

namespace nogo_lab {

/// Counter-based generator: draw k of stream `key` is
///
///     splitmix64_mix(key + (k + 1) * 0x9E3779B97F4A7C15)
///
/// where splitmix64_mix is the SplitMix64 output finalizer. A stream is fully
/// determined by (key, counter), so per-trial streams are derived with
/// `CounterRng::stream(seed, trial)` and never share state.
class CounterRng {
  public:
    static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

    static constexpr std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    explicit CounterRng(std::uint64_t key) : key_(key) {}

    /// Independent stream for trial `index` under a run seed.
    static CounterRng stream(std::uint64_t seed, std::uint64_t index) {
        return CounterRng(mix(seed ^ mix(index + kGolden)));
    }

    std::uint64_t next_u64() {
        ++counter_;
        return mix(key_ + counter_ * kGolden);
    }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [lo, hi] (inclusive). Modulo bias is below 2^-40 for
    /// the ranges used here.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<std::int64_t>(next_u64() % span);
    }

    /// Standard normal via the cosine branch of Box-Muller (two draws each).
    double gaussian() {
        const double u1 = 1.0 - uniform();  // (0, 1]
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    /// Complex standard Gaussian, E|z|^2 = 1.
    Complex complex_gaussian() {
        const double re = gaussian();
        const double im = gaussian();
        return Complex(re, im) * std::sqrt(0.5);
    }

    std::uint64_t key() const { return key_; }
    std::uint64_t counter() const { return counter_; }

  private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

inline CMat random_gaussian_matrix(Eigen::Index rows, Eigen::Index cols, CounterRng &rng) {
    CMat g(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index i = 0; i < rows; ++i) {
            g(i, j) = rng.complex_gaussian();
        }
    }
    return g;
}

/// First `k` columns are orthonormal; Householder QR of a Gaussian matrix.
inline CMat random_isometry(Eigen::Index dim, Eigen::Index k, CounterRng &rng) {
    const CMat g = random_gaussian_matrix(dim, k, rng);
    Eigen::HouseholderQR<CMat> qr(g);
    return qr.householderQ() * CMat::Identity(dim, k);
}

inline CMat random_unitary(Eigen::Index dim, CounterRng &rng) { return random_isometry(dim, dim, rng); }

/// Hermitian with i.i.d. complex Gaussian entries (GUE-like).
inline CMat random_hermitian(Eigen::Index dim, CounterRng &rng) {
    const CMat g = random_gaussian_matrix(dim, dim, rng);
    return 0.5 * (g + g.adjoint());
}

/// G G† / tr[G G†] with G a dim x dim complex Gaussian matrix.
inline CMat random_density_matrix(Eigen::Index dim, CounterRng &rng) {
    const CMat g = random_gaussian_matrix(dim, dim, rng);
    const CMat gg = g * g.adjoint();
    return gg / gg.trace().real();
}

inline CMat random_projector_matrix(Eigen::Index dim, Eigen::Index rank, CounterRng &rng) {
    if (rank == 0) {
        return CMat::Zero(dim, dim);
    }
    const CMat v = random_isometry(dim, rank, rng);
    return v * v.adjoint();
}

}  // namespace nogo_lab
