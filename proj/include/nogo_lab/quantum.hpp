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
#include <string>
#include <vector>

#include "nogo_lab/opcore.hpp"

namespace nogo_lab {

/// Orthogonal projector: Hermitian and idempotent, integral trace.
class Projector {
  public:
    static Projector from_matrix(const CMat &m, const Tolerance &t = {}) {
        require_square_finite(m, "projector");
        const double herm = hermitian_residual(m);
        const double idem = op_norm(m * m - m);
        const double tr = m.trace().real();
        const double rank = std::round(tr);
        if (herm > t.tol || idem > t.tol || std::abs(tr - rank) > t.tol) {
            throw LabError(ErrorKind::NotProjector, "hermitian residual " + std::to_string(herm) +
                                                        ", idempotence residual " + std::to_string(idem) +
                                                        ", trace " + std::to_string(tr));
        }
        return Projector(m, static_cast<Eigen::Index>(rank));
    }

    static Projector zero(Eigen::Index dim) { return Projector(CMat::Zero(dim, dim), 0); }
    static Projector identity(Eigen::Index dim) { return Projector(CMat::Identity(dim, dim), dim); }

    /// |v><v| / <v|v>.
    static Projector onto_ray(const CVec &v) {
        const double n = v.norm();
        if (!(n > 0.0) || !v.allFinite()) {
            throw LabError(ErrorKind::ZeroOperator, "ray vector has zero norm");
        }
        const CVec u = v / n;
        return Projector(u * u.adjoint(), 1);
    }

    /// Projector onto the column span (columns need not be orthonormal).
    static Projector onto_span(const CMat &columns, double tol = Tolerance{}.tol) {
        if (columns.cols() == 0) {
            return zero(columns.rows());
        }
        Eigen::JacobiSVD<CMat> svd(columns, Eigen::ComputeThinU);
        Eigen::Index r = 0;
        const double top = svd.singularValues()(0);
        for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
            if (svd.singularValues()(i) > tol * std::max(1.0, top)) {
                ++r;
            }
        }
        const CMat u = svd.matrixU().leftCols(r);
        return Projector(u * u.adjoint(), r);
    }

    /// Diagonal projector with ones at the listed basis indices.
    static Projector diagonal(Eigen::Index dim, const std::vector<Eigen::Index> &ones) {
        CMat m = CMat::Zero(dim, dim);
        for (auto i : ones) {
            m(i, i) = 1.0;
        }
        return Projector(m, static_cast<Eigen::Index>(ones.size()));
    }

    const CMat &mat() const { return mat_; }
    Eigen::Index dim() const { return mat_.rows(); }
    Eigen::Index rank() const { return rank_; }

    /// I - P.
    Projector complement() const { return Projector(CMat::Identity(dim(), dim()) - mat_, dim() - rank_); }

    /// Orthonormal basis of the range (dim x rank).
    CMat range_basis() const {
        Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (mat_ + mat_.adjoint()));
        // eigenvalues ascending: the last `rank` columns span the range
        return es.eigenvectors().rightCols(rank_);
    }

  private:
    Projector(CMat m, Eigen::Index rank) : mat_(std::move(m)), rank_(rank) {}

    CMat mat_;
    Eigen::Index rank_;
};

/// Density operator: Hermitian, positive, unit trace.
class Density {
  public:
    static Density from_matrix(const CMat &m, const Tolerance &t = {}) {
        require_square_finite(m, "density");
        const double herm = hermitian_residual(m);
        if (herm > t.tol) {
            throw LabError(ErrorKind::NotDensity, "not Hermitian, residual " + std::to_string(herm));
        }
        const double tr = m.trace().real();
        if (std::abs(tr - 1.0) > t.tol) {
            throw LabError(ErrorKind::NotDensity, "trace " + std::to_string(tr));
        }
        if (!is_positive(m, t.tol)) {
            throw LabError(ErrorKind::NotDensity, "negative eigenvalue below -tol");
        }
        return Density(m);
    }

    static Density maximally_mixed(Eigen::Index dim) {
        return Density(CMat::Identity(dim, dim) / static_cast<double>(dim));
    }

    static Density pure(const CVec &psi) {
        const CVec u = psi.normalized();
        return Density(u * u.adjoint());
    }

    const CMat &mat() const { return mat_; }
    Eigen::Index dim() const { return mat_.rows(); }

    /// Re tr[D X].
    double expectation(const CMat &x) const { return trace_inner(mat_, x).real(); }

  private:
    explicit Density(CMat m) : mat_(std::move(m)) {}

    CMat mat_;
};

/// Finite set of selected eigenvalues of one observable; stands in for a
/// Borel set of the real line.
struct EigenvalueSet {
    std::vector<double> values;
};

/// Hermitian operator together with its clustered spectral resolution.
class Observable {
  public:
    static Observable from_matrix(const CMat &m, const Tolerance &t = {}) {
        require_square_finite(m, "observable");
        const double herm = hermitian_residual(m);
        if (herm > t.tol) {
            throw LabError(ErrorKind::NotHermitian, "||A - A^+|| = " + std::to_string(herm));
        }
        return Observable(m, spectral_decompose(m, t.cluster_gap, t.tol));
    }

    static Observable from_projector(const Projector &p, const Tolerance &t = {}) {
        return from_matrix(p.mat(), t);
    }

    const CMat &mat() const { return mat_; }
    const SpectralResolution &resolution() const { return resolution_; }
    Eigen::Index dim() const { return mat_.rows(); }

    /// Distinct eigenvalues, descending.
    std::vector<double> eigenvalues() const {
        std::vector<double> out;
        for (const auto &t : resolution_.terms) {
            out.push_back(t.eigenvalue.real());
        }
        return out;
    }

    EigenvalueSet full_spectrum() const { return EigenvalueSet{eigenvalues()}; }

    /// Index of the spectral term within `gap` of v, or -1.
    int term_index(double v, double gap) const {
        int best = -1;
        double best_dist = gap;
        for (std::size_t i = 0; i < resolution_.terms.size(); ++i) {
            const double d = std::abs(resolution_.terms[i].eigenvalue.real() - v);
            if (d <= best_dist) {
                best = static_cast<int>(i);
                best_dist = d;
            }
        }
        return best;
    }

  private:
    Observable(CMat m, SpectralResolution r) : mat_(std::move(m)), resolution_(std::move(r)) {}

    CMat mat_;
    SpectralResolution resolution_;
};

/// P_A(S): sum of the eigenprojectors of A whose eigenvalue lies in S.
inline Projector spectral_projector(const Observable &a, const EigenvalueSet &s, const Tolerance &t = {}) {
    const auto dim = a.dim();
    std::vector<bool> used(a.resolution().terms.size(), false);
    CMat sum = CMat::Zero(dim, dim);
    for (double v : s.values) {
        const int idx = a.term_index(v, t.cluster_gap);
        if (idx < 0) {
            throw LabError(ErrorKind::UnknownEigenvalue, std::to_string(v) + " is not in the spectrum");
        }
        if (!used[idx]) {
            used[idx] = true;
            sum += a.resolution().terms[idx].projector;
        }
    }
    return Projector::from_matrix(sum, t);
}

namespace detail {

inline double clamp_probability(double numerator, double denominator, double tol) {
    if (numerator < -tol || numerator > denominator + tol) {
        throw LabError(ErrorKind::NumericalAmbiguity,
                       "probability numerator " + std::to_string(numerator) + " outside [0, " +
                           std::to_string(denominator) + "]");
    }
    return std::clamp(numerator / denominator, 0.0, 1.0);
}

}  // namespace detail

/// Pr[A|B] = tr[DBAB] / tr[DB].
inline double conditional_probability(const Density &d, const Projector &a, const Projector &b,
                                      const Tolerance &t = {}) {
    require_same_dim(d.mat(), a.mat());
    require_same_dim(a.mat(), b.mat());
    const double pb = d.expectation(b.mat());
    if (pb <= t.tol) {
        throw LabError(ErrorKind::ConditioningOnNull, "tr[DB] = " + std::to_string(pb));
    }
    const double num = d.expectation(b.mat() * a.mat() * b.mat());
    return detail::clamp_probability(num, pb, t.tol);
}

/// Lüders conditional state D_B = BDB / tr[DB].
inline Density luders_density(const Density &d, const Projector &b, const Tolerance &t = {}) {
    require_same_dim(d.mat(), b.mat());
    const double pb = d.expectation(b.mat());
    if (pb <= t.tol) {
        throw LabError(ErrorKind::ConditioningOnNull, "tr[DB] = " + std::to_string(pb));
    }
    CMat db = b.mat() * d.mat() * b.mat() / pb;
    db = 0.5 * (db + db.adjoint());
    return Density::from_matrix(db, t);
}

/// Projector order: A <= B iff AB = BA = A.
inline bool leq(const Projector &a, const Projector &b, const Tolerance &t = {}) {
    require_same_dim(a.mat(), b.mat());
    return op_norm(a.mat() * b.mat() - a.mat()) <= t.tol && op_norm(b.mat() * a.mat() - a.mat()) <= t.tol;
}

inline Projector orthocomplement(const Projector &a) {
    return a.complement();
}

struct MeasureReport {
    std::vector<double> values;     // tr[D A_i]
    double bounds_residual = 0.0;   // max distance of any value outside [0, 1]
    double zero_residual = 0.0;     // |tr[D 0]|
    double unit_residual = 0.0;     // |tr[D I] - 1|
    double additivity_residual = 0.0;  // |tr[D (sum A_i)] - sum tr[D A_i]|
    double sum = 0.0;
    bool pass = false;
};

/// Instance check of the probability-measure axioms for A -> tr[DA] on an
/// orthogonal family.
inline MeasureReport check_measure_axioms(const Density &d, const std::vector<Projector> &family,
                                          const Tolerance &t = {}) {
    const auto dim = d.dim();
    for (std::size_t i = 0; i < family.size(); ++i) {
        require_same_dim(d.mat(), family[i].mat());
        for (std::size_t j = i + 1; j < family.size(); ++j) {
            const double overlap = op_norm(family[i].mat() * family[j].mat());
            if (overlap > t.tol) {
                throw LabError(ErrorKind::NotOrthogonalFamily, "members " + std::to_string(i) + " and " +
                                                                   std::to_string(j) + " overlap by " +
                                                                   std::to_string(overlap));
            }
        }
    }
    MeasureReport r;
    CMat join = CMat::Zero(dim, dim);
    for (const auto &p : family) {
        const double v = d.expectation(p.mat());
        r.values.push_back(v);
        r.bounds_residual = std::max({r.bounds_residual, -v, v - 1.0});
        r.sum += v;
        join += p.mat();
    }
    r.zero_residual = std::abs(d.expectation(CMat::Zero(dim, dim)));
    r.unit_residual = std::abs(d.expectation(identity(dim)) - 1.0);
    r.additivity_residual = std::abs(d.expectation(join) - r.sum);
    r.pass = r.bounds_residual <= t.tol && r.zero_residual <= t.tol && r.unit_residual <= t.tol &&
             r.additivity_residual <= t.tol;
    return r;
}

/// Sequential product probability Pr{A;B} = tr[DB] tr[D_B A] = tr[BDBA];
/// zero when B has null probability.
inline double davies_joint(const Density &d, const Projector &a, const Projector &b, const Tolerance &t = {}) {
    require_same_dim(d.mat(), a.mat());
    require_same_dim(a.mat(), b.mat());
    if (d.expectation(b.mat()) <= t.tol) {
        return 0.0;
    }
    return trace_inner(b.mat() * d.mat() * b.mat(), a.mat()).real();
}

}  // namespace nogo_lab
