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

#include <gtest/gtest.h>

#include <cmath>

#include "nogo_lab/opcore.hpp"
#include "nogo_lab/random.hpp"

namespace nogo_lab {
namespace {

// Independent oracle: largest singular value by power iteration on M†M.
double power_norm(const CMat &m) {
    const CMat g = m.adjoint() * m;
    CVec v = CVec::Ones(m.cols());
    double lambda = 0.0;
    for (int it = 0; it < 5000; ++it) {
        CVec w = g * v;
        const double n = w.norm();
        if (n == 0.0) {
            return 0.0;
        }
        v = w / n;
        lambda = n;
    }
    return std::sqrt(lambda);
}

CMat diag(std::initializer_list<double> d) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(d.size()));
    Eigen::Index i = 0;
    for (double x : d) {
        v(i++) = x;
    }
    return v.cast<Complex>().asDiagonal();
}

TEST(OpNorm, MatchesPowerIteration) {
    for (int k = 0; k < 20; ++k) {
        CounterRng rng = CounterRng::stream(3, k);
        const CMat m = random_gaussian_matrix(2 + k % 6, 2 + k % 6, rng);
        EXPECT_NEAR(op_norm(m), power_norm(m), 1e-8);
    }
}

TEST(Validation, RejectsNonSquareAndNonFinite) {
    CMat m(2, 3);
    m.setZero();
    EXPECT_THROW(require_square_finite(m), LabError);
    CMat n = CMat::Identity(2, 2);
    n(0, 1) = Complex(std::nan(""), 0);
    try {
        require_square_finite(n);
        FAIL();
    } catch (const LabError &e) {
        EXPECT_EQ(e.kind(), ErrorKind::NonFinite);
    }
}

TEST(SpectralDecompose, Identity) {
    const auto r = spectral_decompose(identity(3));
    ASSERT_EQ(r.terms.size(), 1u);
    EXPECT_NEAR(r.terms[0].eigenvalue.real(), 1.0, 1e-12);
    EXPECT_LE(op_norm(r.terms[0].projector - identity(3)), 1e-12);
}

TEST(SpectralDecompose, DiagonalMergesDegenerateZero) {
    const auto r = spectral_decompose(diag({1, 0, 0}));
    ASSERT_EQ(r.terms.size(), 2u);
    EXPECT_NEAR(r.terms[0].eigenvalue.real(), 1.0, 1e-12);
    EXPECT_LE(op_norm(r.terms[0].projector - diag({1, 0, 0})), 1e-12);
    EXPECT_LE(op_norm(r.terms[1].projector - diag({0, 1, 1})), 1e-12);
    EXPECT_EQ(r.terms[1].multiplicity, 2);
}

TEST(SpectralDecompose, ClustersWithinGap) {
    const auto r = spectral_decompose(diag({1.0, 1.0 + 5e-10, 2.0}), 1e-8);
    EXPECT_EQ(r.terms.size(), 2u);
    const auto split = spectral_decompose(diag({1.0, 1.0 + 1e-6, 2.0}), 1e-8);
    EXPECT_EQ(split.terms.size(), 3u);
}

TEST(SpectralDecompose, ReconstructsRandomHermitian) {
    for (int k = 0; k < 1000; ++k) {
        CounterRng rng = CounterRng::stream(5, k);
        const CMat h = random_hermitian(2 + k % 7, rng);
        const auto r = spectral_decompose(h);
        EXPECT_LE(op_norm(r.reconstruct() - h), 1e-10);
        EXPECT_LE(r.orthogonality_residual(), 1e-10);
        EXPECT_LE(r.completeness_residual(), 1e-10);
    }
}

TEST(SpectralDecompose, NormalNonHermitian) {
    CounterRng rng(17);
    const CMat u = random_unitary(4, rng);
    const auto r = spectral_decompose(u);
    EXPECT_LE(op_norm(r.reconstruct() - u), 1e-10);
    for (const auto &t : r.terms) {
        EXPECT_NEAR(std::abs(t.eigenvalue), 1.0, 1e-10);
    }
}

TEST(SpectralDecompose, RejectsNonNormal) {
    CMat m = CMat::Zero(2, 2);
    m(0, 1) = 1.0;
    try {
        spectral_decompose(m);
        FAIL();
    } catch (const LabError &e) {
        EXPECT_EQ(e.kind(), ErrorKind::NotNormal);
    }
}

TEST(IsPositive, Examples) {
    EXPECT_TRUE(is_positive(identity(3)));
    EXPECT_FALSE(is_positive(diag({1, -1})));
    CounterRng rng(2);
    const CMat g = random_gaussian_matrix(4, 4, rng);
    EXPECT_TRUE(is_positive(g * g.adjoint()));
    CMat skew = CMat::Zero(2, 2);
    skew(0, 1) = 1.0;
    skew(1, 0) = -1.0;
    EXPECT_THROW(is_positive(skew), LabError);
}

TEST(TraceInner, Examples) {
    EXPECT_NEAR(std::abs(trace_inner(identity(3) / 3.0, identity(3)) - 1.0), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(trace_inner(diag({1, 0, 0}), diag({0, 1, 0}))), 0.0, 1e-15);
    EXPECT_NEAR(trace_inner(diag({0.5, 1.0 / 3, 1.0 / 6}), diag({1, 1, 0})).real(), 5.0 / 6, 1e-15);
    EXPECT_THROW(trace_inner(identity(2), identity(3)), LabError);
}

TEST(TraceInner, AgreesWithProductTrace) {
    CounterRng rng(8);
    const CMat a = random_gaussian_matrix(5, 5, rng);
    const CMat b = random_gaussian_matrix(5, 5, rng);
    EXPECT_LE(std::abs(trace_inner(a, b) - (a * b).trace()), 1e-12);
}

TEST(AnnihilationWitness, Diagonal) {
    const auto w = annihilation_witness(diag({1, -3, 0}));
    EXPECT_LE(op_norm(w.density - diag({0, 1, 0})), 1e-12);
    EXPECT_NEAR(w.value.real(), -3.0, 1e-12);
}

TEST(AnnihilationWitness, ZeroOperator) {
    try {
        annihilation_witness(CMat::Zero(3, 3));
        FAIL();
    } catch (const LabError &e) {
        EXPECT_EQ(e.kind(), ErrorKind::ZeroOperator);
    }
}

TEST(AnnihilationWitness, SkewHermitianHalf) {
    CMat b = CMat::Zero(3, 3);
    b(0, 1) = 0.5;
    b(1, 0) = -0.5;
    const auto w = annihilation_witness(b);
    EXPECT_NEAR(std::abs(trace_inner(w.density, b)), 0.5, 1e-12);
    EXPECT_NEAR(w.density.trace().real(), 1.0, 1e-12);
}

TEST(AnnihilationWitness, NonzeroOnRandomNormal) {
    for (int k = 0; k < 200; ++k) {
        CounterRng rng = CounterRng::stream(9, k);
        const CMat h = random_hermitian(2 + k % 6, rng);
        const CMat b = (k % 2) ? h : CMat(Complex(0, 1) * h);
        const auto w = annihilation_witness(b);
        EXPECT_GE(std::abs(trace_inner(w.density, b)), op_norm(b) * (1 - 1e-9));
    }
}

TEST(CommutatorNorm, Examples) {
    CounterRng rng(4);
    const CMat a = random_hermitian(3, rng);
    EXPECT_LE(commutator_norm(a, a), 1e-14);
    EXPECT_LE(commutator_norm(diag({1, 2, 3}), diag({4, 5, 6})), 1e-14);
    CVec f(3);
    f << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0), 0;
    EXPECT_NEAR(commutator_norm(diag({1, 0, 0}), f * f.adjoint()), 0.5, 1e-12);
}

TEST(SkewHermitian, NormIsRootOfSquareNorm) {
    for (int k = 0; k < 200; ++k) {
        CounterRng rng = CounterRng::stream(10, k);
        const double scale = std::pow(10.0, -static_cast<double>(k % 10));
        const CMat c = Complex(0, 1) * random_hermitian(2 + k % 6, rng) * scale;
        const double n = op_norm(c);
        EXPECT_NEAR(n * n, op_norm(c * c), 1e-12 * (1 + n * n));
    }
}

}  // namespace
}  // namespace nogo_lab
