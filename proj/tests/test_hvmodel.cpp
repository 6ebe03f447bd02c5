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

#include "nogo_lab/hvmodel.hpp"
#include "nogo_lab/sampling.hpp"

namespace nogo_lab {
namespace {

CMat diag(std::initializer_list<double> d) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(d.size()));
    Eigen::Index i = 0;
    for (double x : d) {
        v(i++) = x;
    }
    return v.cast<Complex>().asDiagonal();
}

HVModel diagonal_model(bool compounds = false) {
    CommutingModelOptions opts;
    opts.register_compounds = compounds;
    return build_commuting_model({{"A", diag({1, 0, 0})}, {"B", diag({1, 1, 0})}},
                                 Density::from_matrix(diag({0.5, 1.0 / 3, 1.0 / 6})), {}, opts);
}

// Rebuilds a model with one table cell or weight replaced.
HVModel with_cell(const HVModel &m, std::size_t point, const std::string &label, double value) {
    auto table = m.values().table();
    table[point][m.values().index_of(label)] = value;
    return HVModel(m.space(), ValueMap(m.values().items(), table, m.values().compounds()), m.state(), m.tolerance());
}

HVModel with_weight(const HVModel &m, std::size_t point, double w) {
    auto weights = m.space().weights();
    weights[point] = w;
    return HVModel(PhaseSpace::make(m.space().labels(), weights), m.values(), m.state(), m.tolerance());
}

std::size_t point_where(const HVModel &m, const std::string &label, double v) {
    const Event e = preimage(m, label, v);
    EXPECT_FALSE(e.points.empty());
    return e.points.front();
}

TEST(BuildCommutingModel, DiagonalWeights) {
    const HVModel m = diagonal_model();
    ASSERT_EQ(m.space().size(), 3u);
    std::vector<double> w = m.space().weights();
    std::sort(w.begin(), w.end());
    EXPECT_NEAR(w[0], 1.0 / 6, 1e-12);
    EXPECT_NEAR(w[1], 1.0 / 3, 1e-12);
    EXPECT_NEAR(w[2], 0.5, 1e-12);
}

TEST(BuildCommutingModel, IdentityObservable) {
    const HVModel m = build_commuting_model({{"I", identity(3)}}, Density::maximally_mixed(3));
    EXPECT_NEAR(m.space().total(), 1.0, 1e-12);
    EXPECT_EQ(preimage(m, "I", 1.0).points.size(), m.space().size());
}

TEST(BuildCommutingModel, RejectsNoncommuting) {
    CVec f(3);
    f << 1, 1, 0;
    try {
        build_commuting_model({{"A", diag({1, 0, 0})}, {"F", Projector::onto_ray(f).mat()}}, Density::maximally_mixed(3));
        FAIL();
    } catch (const LabError &e) {
        EXPECT_EQ(e.kind(), ErrorKind::NotCommutingFamily);
    }
}

TEST(Preimage, Examples) {
    const HVModel m = diagonal_model();
    EXPECT_EQ(preimage(m, "A", 1.0).points.size(), 1u);
    EXPECT_TRUE(preimage(m, "A", 7.0).points.empty());
    EXPECT_THROW(preimage(m, "nope", 1.0), LabError);
    // distinct eigenvalues partition the space
    const Event one = preimage(m, "B", 1.0), zero = preimage(m, "B", 0.0);
    EXPECT_TRUE(one.intersect(zero).points.empty());
    EXPECT_EQ(one.points.size() + zero.points.size(), m.space().size());
}

TEST(SpectrumRule, FlagsNonEigenvalue) {
    const HVModel m = diagonal_model();
    EXPECT_TRUE(check_spectrum_rule(m).pass);
    EXPECT_FALSE(check_spectrum_rule(with_cell(m, 0, "A", 0.5)).pass);
    const std::size_t p = point_where(m, "A", 1.0);
    EXPECT_TRUE(check_spectrum_rule(with_cell(m, p, "A", 1.0 + 5e-10)).pass);
}

TEST(MarginalRule, Examples) {
    const HVModel m = diagonal_model();
    const auto full = check_marginal_rule(m, "A", EigenvalueSet{{1, 0}});
    EXPECT_NEAR(*full.model_value, 1.0, 1e-12);
    EXPECT_NEAR(*full.quantum_value, 1.0, 1e-12);
    const auto empty = check_marginal_rule(m, "A", EigenvalueSet{{}});
    EXPECT_NEAR(*empty.model_value, 0.0, 1e-12);
    const auto one = check_marginal_rule(m, "A", EigenvalueSet{{1}});
    EXPECT_TRUE(one.pass);
    EXPECT_NEAR(*one.model_value, 0.5, 1e-12);
    EXPECT_NEAR(*one.quantum_value, 0.5, 1e-12);
}

TEST(JointRule, Examples) {
    const HVModel m = diagonal_model();
    const auto ab = check_joint_rule(m, "A", EigenvalueSet{{1}}, "B", EigenvalueSet{{1}});
    EXPECT_TRUE(ab.pass);
    EXPECT_NEAR(*ab.model_value, 0.5, 1e-12);
    const HVModel orth = build_commuting_model({{"A", diag({1, 0, 0})}, {"C", diag({0, 1, 0})}, {"I", identity(3)}},
                                               Density::from_matrix(diag({0.5, 1.0 / 3, 1.0 / 6})));
    const auto ac = check_joint_rule(orth, "A", EigenvalueSet{{1}}, "C", EigenvalueSet{{1}});
    EXPECT_NEAR(*ac.model_value, 0.0, 1e-12);
    EXPECT_NEAR(*ac.quantum_value, 0.0, 1e-12);
    const auto ai = check_joint_rule(orth, "A", EigenvalueSet{{1}}, "I", EigenvalueSet{{1}});
    EXPECT_NEAR(*ai.model_value, *check_marginal_rule(orth, "A", EigenvalueSet{{1}}).model_value, 1e-12);
}

TEST(SumAndProductRules, PassAndFlag) {
    const HVModel m = diagonal_model(true);
    EXPECT_TRUE(check_sum_rule(m, "A", "B", "(A+B)").pass);
    EXPECT_TRUE(check_product_rule(m, "A", "B", "(A*B)").pass);
    const std::size_t p = point_where(m, "A", 1.0);
    const auto bad = check_sum_rule(with_cell(m, p, "(A+B)", 1.0), "A", "B", "(A+B)");
    EXPECT_FALSE(bad.pass);
    EXPECT_EQ(bad.violations.size(), 1u);
    // A = 0, B = 1 at some point while AB reads 1
    const std::size_t q = point_where(m, "A", 0.0);
    EXPECT_FALSE(check_product_rule(with_cell(m, q, "(A*B)", 1.0), "A", "B", "(A*B)").pass);
}

TEST(SumRule, NoncommutingRejected) {
    CVec f(3);
    f << 1, 1, 0;
    const CMat a = diag({1, 0, 0}), b = Projector::onto_ray(f).mat();
    std::vector<RegisteredItem> items = {{"A", Observable::from_matrix(a)},
                                         {"F", Observable::from_matrix(b)},
                                         {"S", Observable::from_matrix(a + b)}};
    const HVModel m(PhaseSpace::make({"w"}, {1.0}), ValueMap(items, {{1, 1, 2}}), Density::maximally_mixed(3));
    try {
        check_sum_rule(m, "A", "F", "S");
        FAIL();
    } catch (const LabError &e) {
        EXPECT_EQ(e.kind(), ErrorKind::NotCommuting);
    }
}

TEST(ProductRule, SelfProductIsIdempotence) {
    std::vector<RegisteredItem> items = {{"A", Observable::from_matrix(diag({1, 0, 0}))}};
    const HVModel m(PhaseSpace::make({"w0", "w1"}, {0.5, 0.5}), ValueMap(items, {{1}, {0}}),
                    Density::maximally_mixed(3));
    EXPECT_TRUE(check_product_rule(m, "A", "A", "A").pass);
}

TEST(OrderLemma, Examples) {
    const HVModel m = diagonal_model();
    EXPECT_TRUE(check_lemma1(m, "A", "B").pass);
    EXPECT_TRUE(check_lemma1(m, "A", "A").pass);
    try {
        check_lemma1(m, "B", "A");
        FAIL();
    } catch (const LabError &e) {
        EXPECT_EQ(e.kind(), ErrorKind::OrderViolation);
    }
    const HVModel z = build_commuting_model({{"Z", CMat::Zero(3, 3)}, {"B", diag({1, 1, 0})}},
                                            Density::maximally_mixed(3));
    EXPECT_TRUE(check_lemma1(z, "Z", "B").pass);
    // corrupt b at a point of a
    const std::size_t p = point_where(m, "A", 1.0);
    EXPECT_FALSE(check_lemma1(with_cell(m, p, "B", 0.0), "A", "B").pass);
}

TEST(ConditionalRule, Examples) {
    const HVModel m = build_commuting_model({{"A", diag({1, 0, 0})}, {"B", diag({1, 1, 0})}},
                                            Density::maximally_mixed(3));
    const auto r = check_conditional_rule(m, "A", "B");
    EXPECT_TRUE(r.pass);
    EXPECT_NEAR(*r.model_value, 0.5, 1e-12);
    EXPECT_NEAR(*r.quantum_value, 0.5, 1e-12);
    EXPECT_NEAR(*check_conditional_rule(m, "B", "B").model_value, 1.0, 1e-12);
    const auto bad = check_conditional_rule(with_weight(m, point_where(m, "A", 1.0), 0.5), "A", "B");
    EXPECT_FALSE(bad.pass);
    EXPECT_FALSE(bad.violations.empty());
    const HVModel null_b = build_commuting_model({{"A", diag({1, 0, 0})}, {"B", diag({0, 0, 1})}},
                                                 Density::from_matrix(diag({1, 0, 0})));
    try {
        check_conditional_rule(null_b, "A", "B");
        FAIL();
    } catch (const LabError &e) {
        EXPECT_EQ(e.kind(), ErrorKind::ConditioningOnNull);
    }
}

TEST(RunAllChecks, RoundTripOnRandomFamilies) {
    for (int k = 0; k < 60; ++k) {
        CounterRng rng = CounterRng::stream(31, k);
        const auto dim = 3 + k % 4;
        const auto family = random_commuting_family(dim, 2, rng);
        const Density d = Density::from_matrix(random_density_matrix(dim, rng));
        const HVModel m = build_commuting_model(family, d);
        for (const auto &r : run_all_checks(m)) {
            EXPECT_TRUE(r.pass) << r.check << " residual " << r.residual;
            EXPECT_LE(r.residual, 1e-9) << r.check;
        }
    }
}

// Any single corrupted cell or weight (beyond 10 tol) is caught.
TEST(RunAllChecks, SingleCorruptionIsFlagged) {
    for (int k = 0; k < 30; ++k) {
        CounterRng rng = CounterRng::stream(32, k);
        const auto dim = 3 + k % 3;
        const HVModel m = build_commuting_model(random_commuting_family(dim, 1, rng),
                                                Density::from_matrix(random_density_matrix(dim, rng)));
        const std::size_t p = static_cast<std::size_t>(rng.uniform_int(0, dim - 1));
        const auto item = static_cast<std::size_t>(rng.uniform_int(0, m.values().items().size() - 1));
        const double delta = 1e-7 * (1 + rng.uniform());
        auto any_fail = [](const HVModel &x) {
            for (const auto &r : run_all_checks(x)) {
                if (!r.pass) {
                    return true;
                }
            }
            return false;
        };
        EXPECT_TRUE(any_fail(with_cell(m, p, m.values().items()[item].label, m.values().value(p, item) + delta)));
        EXPECT_TRUE(any_fail(with_weight(m, p, m.space().weights()[p] + delta)));
    }
}

TEST(PhaseSpace, RejectsNegativeWeight) { EXPECT_THROW(PhaseSpace::make({"a"}, {-0.1}), LabError); }

}  // namespace
}  // namespace nogo_lab
