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

#include <cstddef>
#include <optional>
#include <vector>

#include <boost/multiprecision/gmp.hpp>

namespace nogo_lab {

using Rational = boost::multiprecision::mpq_rational;

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    std::vector<Rational> x;          // primal solution (Optimal)
    Rational objective = 0;           // c.x (Optimal)
    Rational infeasibility = 0;       // phase-1 optimum, sum of artificials
    /// Farkas certificate when infeasible: y.A <= 0 componentwise, y.b > 0.
    std::vector<Rational> farkas;
};

/// Dense tableau simplex over exact rationals for
///
///     maximize c.x  subject to  A x = b,  x >= 0.
///
/// Two phases with artificial variables; Bland's smallest-index rule for both
/// entering and leaving choices, so it terminates on degenerate problems.
/// An empty `c` means phase 1 only (feasibility).
class ExactSimplex {
  public:
    ExactSimplex(std::vector<std::vector<Rational>> a, std::vector<Rational> b, std::vector<Rational> c = {})
        : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)) {
        m_ = a_.size();
        n_ = m_ ? a_[0].size() : (c_.size());
    }

    LpResult solve() {
        LpResult out;
        build_phase1();
        run();
        out.infeasibility = -obj_;
        if (out.infeasibility > 0) {
            out.status = LpStatus::Infeasible;
            // phase-1 duals: d_{art r} = -1 - y_r; the certificate is -y, mapped
            // back through the row sign flips
            out.farkas.resize(m_);
            for (std::size_t r = 0; r < m_; ++r) {
                out.farkas[r] = sign_[r] * (Rational(1) + d_[n_ + r]);
            }
            return out;
        }
        drive_out_artificials();
        if (!c_.empty()) {
            build_phase2();
            if (!run()) {
                out.status = LpStatus::Unbounded;
                return out;
            }
        }
        out.status = LpStatus::Optimal;
        out.x.assign(n_, Rational(0));
        for (std::size_t r = 0; r < rows_.size(); ++r) {
            if (basis_[r] < n_) {
                out.x[basis_[r]] = rows_[r][rhs_col()];
            }
        }
        out.objective = 0;
        for (std::size_t j = 0; j < c_.size(); ++j) {
            out.objective += c_[j] * out.x[j];
        }
        return out;
    }

  private:
    std::size_t rhs_col() const { return n_ + m_; }

    void build_phase1() {
        rows_.assign(m_, std::vector<Rational>(n_ + m_ + 1, Rational(0)));
        sign_.assign(m_, 1);
        basis_.resize(m_);
        for (std::size_t r = 0; r < m_; ++r) {
            sign_[r] = b_[r] < 0 ? -1 : 1;
            for (std::size_t j = 0; j < n_; ++j) {
                rows_[r][j] = sign_[r] * a_[r][j];
            }
            rows_[r][n_ + r] = 1;
            rows_[r][rhs_col()] = sign_[r] * b_[r];
            basis_[r] = n_ + r;
        }
        // maximize -(sum of artificials): reduced costs d_j = c_j - c_B B^-1 A_j
        d_.assign(n_ + m_, Rational(0));
        obj_ = 0;
        for (std::size_t r = 0; r < m_; ++r) {
            for (std::size_t j = 0; j < n_; ++j) {
                d_[j] += rows_[r][j];
            }
            obj_ -= rows_[r][rhs_col()];
        }
    }

    void build_phase2() {
        d_.assign(n_ + m_, Rational(0));
        for (std::size_t j = 0; j < n_; ++j) {
            d_[j] = c_[j];
        }
        obj_ = 0;
        for (std::size_t r = 0; r < rows_.size(); ++r) {
            const std::size_t bj = basis_[r];
            const Rational cb = bj < n_ ? c_[bj] : Rational(0);
            if (cb == 0) {
                continue;
            }
            for (std::size_t j = 0; j < n_ + m_; ++j) {
                d_[j] -= cb * rows_[r][j];
            }
            obj_ += cb * rows_[r][rhs_col()];
        }
    }

    /// Returns false on unboundedness. Maximizes; d_ holds reduced costs.
    bool run() {
        const std::size_t limit = n_;  // artificials never re-enter
        for (;;) {
            std::size_t enter = limit;
            for (std::size_t j = 0; j < limit; ++j) {
                if (d_[j] > 0) {
                    enter = j;
                    break;
                }
            }
            if (enter == limit) {
                return true;
            }
            std::optional<std::size_t> leave;
            Rational best;
            for (std::size_t r = 0; r < rows_.size(); ++r) {
                if (rows_[r][enter] > 0) {
                    const Rational ratio = rows_[r][rhs_col()] / rows_[r][enter];
                    if (!leave || ratio < best || (ratio == best && basis_[r] < basis_[*leave])) {
                        leave = r;
                        best = ratio;
                    }
                }
            }
            if (!leave) {
                return false;
            }
            pivot(*leave, enter);
        }
    }

    void pivot(std::size_t r, std::size_t col) {
        const Rational p = rows_[r][col];
        for (auto &v : rows_[r]) {
            v /= p;
        }
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            if (i == r || rows_[i][col] == 0) {
                continue;
            }
            const Rational f = rows_[i][col];
            for (std::size_t j = 0; j < rows_[i].size(); ++j) {
                if (rows_[r][j] != 0) {
                    rows_[i][j] -= f * rows_[r][j];
                }
            }
        }
        if (d_[col] != 0) {
            const Rational f = d_[col];
            for (std::size_t j = 0; j < n_ + m_; ++j) {
                if (rows_[r][j] != 0) {
                    d_[j] -= f * rows_[r][j];
                }
            }
            obj_ += f * rows_[r][rhs_col()];
        }
        basis_[r] = col;
    }

    /// After a feasible phase 1, artificials still basic sit at zero. Pivot
    /// them out on any structural column, or drop the row if it is redundant.
    void drive_out_artificials() {
        for (std::size_t r = 0; r < rows_.size();) {
            if (basis_[r] < n_) {
                ++r;
                continue;
            }
            std::size_t col = n_;
            for (std::size_t j = 0; j < n_; ++j) {
                if (rows_[r][j] != 0) {
                    col = j;
                    break;
                }
            }
            if (col == n_) {
                rows_.erase(rows_.begin() + static_cast<std::ptrdiff_t>(r));
                basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(r));
                continue;
            }
            pivot(r, col);
            ++r;
        }
    }

    std::vector<std::vector<Rational>> a_;
    std::vector<Rational> b_;
    std::vector<Rational> c_;
    std::size_t m_ = 0;
    std::size_t n_ = 0;

    std::vector<std::vector<Rational>> rows_;
    std::vector<int> sign_;
    std::vector<std::size_t> basis_;
    std::vector<Rational> d_;
    Rational obj_ = 0;
};

inline LpResult solve_lp(std::vector<std::vector<Rational>> a, std::vector<Rational> b,
                         std::vector<Rational> c = {}) {
    return ExactSimplex(std::move(a), std::move(b), std::move(c)).solve();
}

}  // namespace nogo_lab
