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

#include <optional>
#include <vector>

#include "nogo_lab/random.hpp"
#include "nogo_lab/rational_simplex.hpp"

namespace nogo_lab {
namespace {

using Mat = std::vector<std::vector<Rational>>;
using Vec = std::vector<Rational>;

Rational q(long n, long d = 1) { return Rational(n) / Rational(d); }

// Solves the square system M z = r exactly; nullopt when singular.
std::optional<Vec> solve_square(Mat m, Vec r) {
    const std::size_t n = m.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        while (p < n && m[p][c] == 0) {
            ++p;
        }
        if (p == n) {
            return std::nullopt;
        }
        std::swap(m[p], m[c]);
        std::swap(r[p], r[c]);
        for (std::size_t i = 0; i < n; ++i) {
            if (i != c && m[i][c] != 0) {
                const Rational f = m[i][c] / m[c][c];
                for (std::size_t j = c; j < n; ++j) {
                    m[i][j] -= f * m[c][j];
                }
                r[i] -= f * r[c];
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        r[i] /= m[i][i];
    }
    return r;
}

// Vertex-enumeration oracle for a full-row-rank bounded LP: best c.x over
// basic feasible solutions, nullopt when none exists.
std::optional<Rational> vertex_oracle(const Mat &a, const Vec &b, const Vec &c, bool *full_rank = nullptr) {
    const std::size_t m = a.size(), n = a[0].size();
    std::optional<Rational> best;
    std::vector<bool> pick(n, false);
    std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(m), true);
    std::sort(pick.begin(), pick.end());
    do {
        std::vector<std::size_t> cols;
        for (std::size_t j = 0; j < n; ++j) {
            if (pick[j]) {
                cols.push_back(j);
            }
        }
        Mat sq(m, Vec(m));
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t k = 0; k < m; ++k) {
                sq[i][k] = a[i][cols[k]];
            }
        }
        const auto z = solve_square(sq, b);
        if (!z) {
            continue;
        }
        if (full_rank) {
            *full_rank = true;
        }
        bool feasible = true;
        Rational obj = 0;
        for (std::size_t k = 0; k < m; ++k) {
            feasible = feasible && (*z)[k] >= 0;
            obj += c[cols[k]] * (*z)[k];
        }
        if (feasible && (!best || obj > *best)) {
            best = obj;
        }
    } while (std::next_permutation(pick.begin(), pick.end()));
    return best;
}

void expect_primal_feasible(const Mat &a, const Vec &b, const Vec &x) {
    for (std::size_t i = 0; i < a.size(); ++i) {
        Rational s = 0;
        for (std::size_t j = 0; j < x.size(); ++j) {
            s += a[i][j] * x[j];
        }
        EXPECT_EQ(s, b[i]) << "row " << i;
    }
    for (const auto &v : x) {
        EXPECT_GE(v, 0);
    }
}

void expect_farkas(const Mat &a, const Vec &b, const Vec &y) {
    ASSERT_EQ(y.size(), a.size());
    for (std::size_t j = 0; j < a[0].size(); ++j) {
        Rational s = 0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            s += y[i] * a[i][j];
        }
        EXPECT_LE(s, 0) << "column " << j;
    }
    Rational yb = 0;
    for (std::size_t i = 0; i < b.size(); ++i) {
        yb += y[i] * b[i];
    }
    EXPECT_GT(yb, 0);
}

TEST(ExactSimplex, TextbookMaximum) {
    // max 3x + 5y s.t. x <= 4, 2y <= 12, 3x + 2y <= 18 (slacks appended); optimum 36 at (2, 6)
    const Mat a = {{1, 0, 1, 0, 0}, {0, 2, 0, 1, 0}, {3, 2, 0, 0, 1}};
    const Vec b = {4, 12, 18};
    const Vec c = {3, 5, 0, 0, 0};
    const auto r = solve_lp(a, b, c);
    ASSERT_EQ(r.status, LpStatus::Optimal);
    EXPECT_EQ(r.objective, 36);
    EXPECT_EQ(r.x[0], 2);
    EXPECT_EQ(r.x[1], 6);
    expect_primal_feasible(a, b, r.x);
}

TEST(ExactSimplex, FractionalOptimum) {
    // max x + y s.t. 2x + y + s1 = 1, x + 2y + s2 = 1; optimum 2/3 at (1/3, 1/3)
    const Mat a = {{2, 1, 1, 0}, {1, 2, 0, 1}};
    const auto r = solve_lp(a, {1, 1}, {1, 1, 0, 0});
    ASSERT_EQ(r.status, LpStatus::Optimal);
    EXPECT_EQ(r.objective, q(2, 3));
    EXPECT_EQ(r.x[0], q(1, 3));
}

TEST(ExactSimplex, InfeasibleWithCertificate) {
    // x + y = 1 and x + y = 2
    const Mat a = {{1, 1}, {1, 1}};
    const Vec b = {1, 2};
    const auto r = solve_lp(a, b);
    ASSERT_EQ(r.status, LpStatus::Infeasible);
    EXPECT_GT(r.infeasibility, 0);
    expect_farkas(a, b, r.farkas);
}

TEST(ExactSimplex, InfeasibleNegativeRhs) {
    // x - y = -1, x = 0, y = 0 (via x + y = 0)
    const Mat a = {{1, -1}, {1, 1}};
    const Vec b = {-1, 0};
    const auto r = solve_lp(a, b);
    ASSERT_EQ(r.status, LpStatus::Infeasible);
    expect_farkas(a, b, r.farkas);
}

TEST(ExactSimplex, Unbounded) {
    // max x s.t. x - y = 0
    const auto r = solve_lp({{1, -1}}, {0}, {1, 0});
    EXPECT_EQ(r.status, LpStatus::Unbounded);
}

TEST(ExactSimplex, RedundantRows) {
    const Mat a = {{1, 1, 0}, {2, 2, 0}, {0, 1, 1}};
    const Vec b = {1, 2, 1};
    const auto r = solve_lp(a, b, {0, 1, 0});
    ASSERT_EQ(r.status, LpStatus::Optimal);
    EXPECT_EQ(r.objective, 1);
    expect_primal_feasible(a, b, r.x);
}

TEST(ExactSimplex, EmptyConstraintSet) {
    const auto r = solve_lp({}, {});
    EXPECT_EQ(r.status, LpStatus::Optimal);
}

// Beale's degenerate example cycles under the largest-coefficient rule.
TEST(ExactSimplex, BealeTerminates) {
    const Mat a = {{q(1, 4), -8, -1, 9, 1, 0, 0}, {q(1, 2), -12, q(-1, 2), 3, 0, 1, 0}, {0, 0, 1, 0, 0, 0, 1}};
    const Vec b = {0, 0, 1};
    const Vec c = {q(3, 4), -20, q(1, 2), -6, 0, 0, 0};
    const auto r = solve_lp(a, b, c);
    ASSERT_EQ(r.status, LpStatus::Optimal);
    EXPECT_EQ(r.objective, q(5, 4));
    EXPECT_EQ(r.objective, *vertex_oracle(a, b, c));
    expect_primal_feasible(a, b, r.x);
}

// Random bounded LPs: a capped sum row keeps the region bounded so the
// vertex oracle decides both feasibility and the optimum.
TEST(ExactSimplex, MatchesVertexOracle) {
    int infeasible = 0;
    for (int k = 0; k < 300; ++k) {
        CounterRng rng = CounterRng::stream(77, k);
        const std::size_t m = 2 + k % 2, n = 5;
        Mat a(m + 1, Vec(n + 1, 0));
        Vec b(m + 1), c(n + 1, 0);
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                a[i][j] = rng.uniform_int(-3, 3);
            }
            b[i] = rng.uniform_int(-4, 4);
        }
        for (std::size_t j = 0; j <= n; ++j) {
            a[m][j] = 1;
        }
        b[m] = 6;
        for (std::size_t j = 0; j < n; ++j) {
            c[j] = rng.uniform_int(-5, 5);
        }
        bool full_rank = false;
        const auto oracle = vertex_oracle(a, b, c, &full_rank);
        if (!full_rank) {
            continue;
        }
        const auto r = solve_lp(a, b, c);
        if (r.status == LpStatus::Optimal) {
            ASSERT_TRUE(oracle.has_value()) << "case " << k;
            EXPECT_EQ(r.objective, *oracle) << "case " << k;
            expect_primal_feasible(a, b, r.x);
        } else {
            ASSERT_EQ(r.status, LpStatus::Infeasible) << "case " << k;
            EXPECT_FALSE(oracle.has_value()) << "case " << k;
            expect_farkas(a, b, r.farkas);
            ++infeasible;
        }
    }
    EXPECT_GT(infeasible, 10);
}

}  // namespace
}  // namespace nogo_lab
