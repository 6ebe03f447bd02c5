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

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nogo_lab/errors.hpp"

namespace nogo_lab {

using Complex = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

/// Validation thresholds. `tol` bounds every ∞-norm residual; `cluster_gap`
/// is the distance below which two eigenvalues are treated as one.
struct Tolerance {
    double tol = 1e-9;
    double cluster_gap = 1e-8;
};

inline void require_square_finite(const CMat &m, std::string_view what = "matrix") {
    if (m.rows() != m.cols() || m.rows() == 0) {
        throw LabError(ErrorKind::NotSquare, std::string(what) + " is " + std::to_string(m.rows()) + "x" +
                                                 std::to_string(m.cols()));
    }
    if (!m.allFinite()) {
        throw LabError(ErrorKind::NonFinite, std::string(what) + " has NaN or Inf entries");
    }
}

inline void require_same_dim(const CMat &a, const CMat &b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw LabError(ErrorKind::DimensionMismatch, std::to_string(a.rows()) + " vs " + std::to_string(b.rows()));
    }
}

/// Operator norm (largest singular value). For normal matrices this is the
/// largest eigenvalue modulus.
inline double op_norm(const CMat &m) {
    if (m.size() == 0) {
        return 0.0;
    }
    Eigen::JacobiSVD<CMat> svd(m);
    return svd.singularValues()(0);
}

inline double hermitian_residual(const CMat &m) { return op_norm(m - m.adjoint()); }

inline double normal_residual(const CMat &m) { return op_norm(m * m.adjoint() - m.adjoint() * m); }

inline bool is_hermitian(const CMat &m, double tol = Tolerance{}.tol) { return hermitian_residual(m) <= tol; }

inline CMat identity(Eigen::Index dim) { return CMat::Identity(dim, dim); }

inline CMat commutator(const CMat &a, const CMat &b) {
    require_same_dim(a, b);
    return a * b - b * a;
}

inline double commutator_norm(const CMat &a, const CMat &b) { return op_norm(commutator(a, b)); }

inline Complex trace_inner(const CMat &d, const CMat &b) {
    require_same_dim(d, b);
    // tr[DB] = sum_ij D_ij B_ji
    return (d.array() * b.transpose().array()).sum();
}

/// Orthonormal eigenbasis of a normal matrix: M = V diag(values) V†.
struct EigenBasis {
    CVec values;
    CMat vectors;
};

inline EigenBasis eigen_basis(const CMat &m, double tol = Tolerance{}.tol) {
    require_square_finite(m);
    const double nres = normal_residual(m);
    if (nres > tol) {
        throw LabError(ErrorKind::NotNormal, "||MM^+ - M^+M|| = " + std::to_string(nres));
    }
    EigenBasis out;
    if (hermitian_residual(m) <= tol) {
        const CMat h = 0.5 * (m + m.adjoint());
        Eigen::SelfAdjointEigenSolver<CMat> es(h);
        out.values = es.eigenvalues().cast<Complex>();
        out.vectors = es.eigenvectors();
    } else {
        // Schur form of a normal matrix is diagonal and its Schur vectors are unitary.
        Eigen::ComplexSchur<CMat> schur(m);
        out.values = schur.matrixT().diagonal();
        out.vectors = schur.matrixU();
    }
    return out;
}

struct SpectralTerm {
    Complex eigenvalue;
    CMat projector;
    Eigen::Index multiplicity = 0;
};

struct SpectralResolution {
    std::vector<SpectralTerm> terms;
    Eigen::Index source_dim = 0;

    CMat reconstruct() const {
        CMat out = CMat::Zero(source_dim, source_dim);
        for (const auto &t : terms) {
            out += t.eigenvalue * t.projector;
        }
        return out;
    }

    double orthogonality_residual() const {
        double worst = 0.0;
        for (std::size_t i = 0; i < terms.size(); ++i) {
            for (std::size_t j = i + 1; j < terms.size(); ++j) {
                worst = std::max(worst, op_norm(terms[i].projector * terms[j].projector));
            }
        }
        return worst;
    }

    double completeness_residual() const {
        CMat sum = CMat::Zero(source_dim, source_dim);
        for (const auto &t : terms) {
            sum += t.projector;
        }
        return op_norm(sum - identity(source_dim));
    }
};

namespace detail {

inline bool descending(const Complex &a, const Complex &b) {
    if (a.real() != b.real()) {
        return a.real() > b.real();
    }
    return a.imag() > b.imag();
}

/// Single-linkage clusters of eigenvalue indices, each cluster listed in
/// ascending index order, clusters ordered by descending mean eigenvalue.
inline std::vector<std::vector<Eigen::Index>> cluster_eigenvalues(const CVec &values, double gap) {
    const Eigen::Index n = values.size();
    std::vector<Eigen::Index> parent(static_cast<std::size_t>(n));
    std::iota(parent.begin(), parent.end(), Eigen::Index{0});
    auto find = [&](Eigen::Index i) {
        while (parent[i] != i) {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        return i;
    };
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            if (std::abs(values(i) - values(j)) < gap) {
                parent[find(j)] = find(i);
            }
        }
    }
    std::vector<std::vector<Eigen::Index>> groups;
    std::vector<Eigen::Index> slot(static_cast<std::size_t>(n), -1);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::Index r = find(i);
        if (slot[r] < 0) {
            slot[r] = static_cast<Eigen::Index>(groups.size());
            groups.emplace_back();
        }
        groups[slot[r]].push_back(i);
    }
    auto mean = [&](const std::vector<Eigen::Index> &g) {
        Complex s = 0.0;
        for (auto i : g) {
            s += values(i);
        }
        return s / static_cast<double>(g.size());
    };
    std::stable_sort(groups.begin(), groups.end(),
                     [&](const auto &a, const auto &b) { return descending(mean(a), mean(b)); });
    return groups;
}

}  // namespace detail

/// Spectral resolution M = Σ λ_i P_i of a normal matrix. Eigenvalues closer
/// than `cluster_gap` share one eigenprojector; terms are ordered by
/// descending real part, then imaginary part.
inline SpectralResolution spectral_decompose(const CMat &m, double cluster_gap = Tolerance{}.cluster_gap,
                                             double tol = Tolerance{}.tol) {
    const EigenBasis eb = eigen_basis(m, tol);
    const bool hermitian = hermitian_residual(m) <= tol;
    SpectralResolution res;
    res.source_dim = m.rows();
    for (const auto &group : detail::cluster_eigenvalues(eb.values, cluster_gap)) {
        SpectralTerm term;
        term.projector = CMat::Zero(m.rows(), m.rows());
        Complex sum = 0.0;
        for (auto i : group) {
            const CVec v = eb.vectors.col(i);
            term.projector += v * v.adjoint();
            sum += eb.values(i);
        }
        term.eigenvalue = sum / static_cast<double>(group.size());
        if (hermitian) {
            term.eigenvalue = Complex(term.eigenvalue.real(), 0.0);
        }
        term.multiplicity = static_cast<Eigen::Index>(group.size());
        res.terms.push_back(std::move(term));
    }
    return res;
}

/// True iff the Hermitian matrix has no eigenvalue below -tol.
inline bool is_positive(const CMat &m, double tol = Tolerance{}.tol) {
    require_square_finite(m);
    const double hres = hermitian_residual(m);
    if (hres > tol) {
        throw LabError(ErrorKind::NotHermitian, "||M - M^+|| = " + std::to_string(hres));
    }
    const CMat h = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<CMat> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff() >= -tol;
}

struct AnnihilationWitness {
    CMat density;       // rank-one projector |v><v|
    Complex value;      // tr[density * B], equal to the selected eigenvalue
};

/// Rank-one density built from an eigenvector of a maximal-modulus
/// eigenvalue of the normal matrix B, so |tr[DB]| = ||B||. A nonzero
/// normal operator is never annihilated by every density.
inline AnnihilationWitness annihilation_witness(const CMat &b, double tol = Tolerance{}.tol) {
    require_square_finite(b);
    const double norm = op_norm(b);
    if (norm <= tol) {
        throw LabError(ErrorKind::ZeroOperator, "||B|| = " + std::to_string(norm));
    }
    const EigenBasis eb = eigen_basis(b, tol);
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < eb.values.size(); ++i) {
        if (std::abs(eb.values(i)) > std::abs(eb.values(best))) {
            best = i;
        }
    }
    const CVec v = eb.vectors.col(best).normalized();
    AnnihilationWitness w;
    w.density = v * v.adjoint();
    w.value = trace_inner(w.density, b);
    return w;
}

}  // namespace nogo_lab
