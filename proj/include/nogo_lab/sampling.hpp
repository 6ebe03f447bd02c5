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

#include <array>
#include <numeric>
#include <vector>

#include "nogo_lab/hvmodel.hpp"
#include "nogo_lab/random.hpp"
#include "nogo_lab/scenarios.hpp"

namespace nogo_lab {

/// Random subset of {0, ..., dim-1} of the given size (partial Fisher-Yates).
inline std::vector<Eigen::Index> random_subset(Eigen::Index dim, Eigen::Index size, CounterRng &rng) {
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(dim));
    std::iota(idx.begin(), idx.end(), 0);
    for (Eigen::Index i = 0; i < size; ++i) {
        const auto j = rng.uniform_int(i, dim - 1);
        std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
    }
    idx.resize(static_cast<std::size_t>(size));
    return idx;
}

/// U diag(values) U†.
inline CMat rotate_diagonal(const CMat &u, const Eigen::VectorXd &values) {
    return u * values.cast<Complex>().asDiagonal() * u.adjoint();
}

/// Two projectors diagonal in one random basis, ranks in [1, dim-1].
inline std::array<Projector, 2> random_commuting_pair(Eigen::Index dim, CounterRng &rng) {
    const CMat u = random_unitary(dim, rng);
    std::array<CMat, 2> mats;
    for (auto &m : mats) {
        Eigen::VectorXd diag = Eigen::VectorXd::Zero(dim);
        for (auto i : random_subset(dim, rng.uniform_int(1, dim - 1), rng)) {
            diag(i) = 1.0;
        }
        m = rotate_diagonal(u, diag);
    }
    return {Projector::from_matrix(mats[0]), Projector::from_matrix(mats[1])};
}

/// Haar-random projectors of random ranks in [1, dim-1], resampled until the
/// commutator norm exceeds `min_commutator`.
inline std::array<Projector, 2> random_noncommuting_pair(Eigen::Index dim, CounterRng &rng,
                                                        double min_commutator = 0.05) {
    for (int attempt = 0; attempt < 10000; ++attempt) {
        const CMat a = random_projector_matrix(dim, rng.uniform_int(1, dim - 1), rng);
        const CMat b = random_projector_matrix(dim, rng.uniform_int(1, dim - 1), rng);
        if (commutator_norm(a, b) > min_commutator) {
            return {Projector::from_matrix(a), Projector::from_matrix(b)};
        }
    }
    throw LabError(ErrorKind::ConfigError, "could not sample a noncommuting pair");
}

/// Pairwise commuting family in a random basis: a nested projector pair
/// P <= Q (so the order lemma has work to do), plus `extra` observables with
/// small integer eigenvalues, which makes degenerate spectra common.
inline std::vector<LabeledMatrix> random_commuting_family(Eigen::Index dim, int extra, CounterRng &rng) {
    const CMat u = random_unitary(dim, rng);
    std::vector<LabeledMatrix> out;
    const auto q_rank = rng.uniform_int(1, dim - 1);
    const auto q_support = random_subset(dim, q_rank, rng);
    Eigen::VectorXd q = Eigen::VectorXd::Zero(dim), p = Eigen::VectorXd::Zero(dim);
    const auto p_rank = rng.uniform_int(1, q_rank);
    for (Eigen::Index k = 0; k < q_rank; ++k) {
        q(q_support[static_cast<std::size_t>(k)]) = 1.0;
        if (k < p_rank) {
            p(q_support[static_cast<std::size_t>(k)]) = 1.0;
        }
    }
    out.push_back({"P", rotate_diagonal(u, p)});
    out.push_back({"Q", rotate_diagonal(u, q)});
    for (int e = 0; e < extra; ++e) {
        Eigen::VectorXd diag(dim);
        for (Eigen::Index k = 0; k < dim; ++k) {
            diag(k) = static_cast<double>(rng.uniform_int(-1, 2));
        }
        out.push_back({"X" + std::to_string(e), rotate_diagonal(u, diag)});
    }
    return out;
}

/// Haar-random ±1 qubit observable V Z V†.
inline CMat random_qubit_dichotomic(CounterRng &rng) {
    const CMat v = random_unitary(2, rng);
    return v * pauli::Z() * v.adjoint();
}

/// Random two-qubit state (density from a Gaussian) and random local settings.
struct ChshInstance {
    CMat state;
    std::array<CMat, 4> settings;  // A, A', B, B'
};

inline ChshInstance random_chsh_instance(CounterRng &rng) {
    ChshInstance out;
    out.state = random_density_matrix(4, rng);
    for (int i = 0; i < 4; ++i) {
        const CMat local = random_qubit_dichotomic(rng);
        out.settings[i] = i < 2 ? pauli::kron(local, pauli::I()) : pauli::kron(pauli::I(), local);
    }
    return out;
}

/// Werner-type state p|singlet><singlet| + (1-p) I/4, p in [1/2, 1], with
/// in-plane settings jittered around (0, 90, 45, 135) degrees; state and
/// settings are conjugated by one random local unitary U_A (x) U_B. Roughly
/// half of these instances violate a CHSH inequality.
inline ChshInstance random_entangled_chsh_instance(CounterRng &rng, double jitter_deg = 15.0) {
    const double p = 0.5 + 0.5 * rng.uniform();
    const CMat singlet = named_state("singlet", 4).mat();
    const CMat u = pauli::kron(random_unitary(2, rng), random_unitary(2, rng));
    ChshInstance out;
    out.state = u * (p * singlet + (1.0 - p) * CMat::Identity(4, 4) / 4.0) * u.adjoint();
    out.state = 0.5 * (out.state + out.state.adjoint());
    const double base[4] = {0.0, 90.0, 45.0, 135.0};
    for (int i = 0; i < 4; ++i) {
        const double theta = (base[i] + jitter_deg * rng.gaussian()) * std::numbers::pi / 180.0;
        const CMat local = pauli::in_plane(theta);
        const CMat full = i < 2 ? pauli::kron(local, pauli::I()) : pauli::kron(pauli::I(), local);
        out.settings[i] = u * full * u.adjoint();
        out.settings[i] = 0.5 * (out.settings[i] + out.settings[i].adjoint());
    }
    return out;
}

inline Scenario chsh_scenario_from(const ChshInstance &inst) {
    return Scenario::make("chsh", 4,
                          {{"A", ItemKind::Dichotomic, inst.settings[0]},
                           {"A'", ItemKind::Dichotomic, inst.settings[1]},
                           {"B", ItemKind::Dichotomic, inst.settings[2]},
                           {"B'", ItemKind::Dichotomic, inst.settings[3]}},
                          {{"A", "B"}, {"A", "B'"}, {"A'", "B"}, {"A'", "B'"}}, {}, inst.state);
}

}  // namespace nogo_lab
