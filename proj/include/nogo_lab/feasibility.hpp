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
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "nogo_lab/quantum.hpp"
#include "nogo_lab/rational_simplex.hpp"

namespace nogo_lab {

enum class ItemKind { Projector, Dichotomic };

inline std::string_view to_string(ItemKind k) { return k == ItemKind::Projector ? "projector" : "dichotomic"; }

struct ItemSpec {
    std::string label;
    ItemKind kind;
    CMat mat;
};

struct ScenarioItem {
    std::string label;
    ItemKind kind;
    CMat mat;
    std::vector<int> spectrum;          // ascending; subset of {0, 1} or {-1, +1}
    std::vector<CMat> value_projectors;  // P_X(v) for v in spectrum
};

/// Declares that the product of the listed (commuting) items is sign * I.
struct ProductConstraint {
    std::vector<std::string> labels;
    int sign = 1;
};

/// Labelled projectors and ±1 observables with commuting contexts. Items are
/// kept sorted by label; that order fixes the enumeration order.
class Scenario {
  public:
    static Scenario make(std::string name, Eigen::Index dim, std::vector<ItemSpec> specs,
                         std::vector<std::vector<std::string>> contexts, std::vector<ProductConstraint> products = {},
                         std::optional<CMat> state = std::nullopt, const Tolerance &t = {}) {
        Scenario s;
        s.name_ = std::move(name);
        s.dim_ = dim;
        s.tol_ = t;
        std::sort(specs.begin(), specs.end(), [](const auto &a, const auto &b) { return a.label < b.label; });
        for (auto &spec : specs) {
            if (spec.mat.rows() != dim) {
                throw LabError(ErrorKind::DimensionMismatch, "item '" + spec.label + "' has dim " +
                                                                 std::to_string(spec.mat.rows()) + ", scenario " +
                                                                 std::to_string(dim));
            }
            if (!s.index_.emplace(spec.label, s.items_.size()).second) {
                throw LabError(ErrorKind::InvalidScenario, "duplicate label '" + spec.label + "'");
            }
            s.items_.push_back(make_item(std::move(spec), t));
        }
        for (auto &ctx : contexts) {
            std::vector<std::size_t> idx;
            for (const auto &l : ctx) {
                idx.push_back(s.index_of(l));
            }
            std::sort(idx.begin(), idx.end());
            if (std::adjacent_find(idx.begin(), idx.end()) != idx.end()) {
                throw LabError(ErrorKind::InvalidScenario, "context repeats an item");
            }
            s.require_commuting(idx);
            s.contexts_.push_back(std::move(idx));
        }
        for (auto &pc : products) {
            if (pc.sign != 1 && pc.sign != -1) {
                throw LabError(ErrorKind::InvalidScenario, "product sign must be +1 or -1");
            }
            std::vector<std::size_t> idx;
            CMat prod = identity(dim);
            for (const auto &l : pc.labels) {
                idx.push_back(s.index_of(l));
                prod = prod * s.items_[idx.back()].mat;
            }
            s.require_commuting(idx);
            const double res = op_norm(prod - static_cast<double>(pc.sign) * identity(dim));
            if (res > t.tol) {
                throw LabError(ErrorKind::InvalidScenario, "declared product of " + join(pc.labels) + " = " +
                                                               std::to_string(pc.sign) + "I fails by " +
                                                               std::to_string(res));
            }
            std::sort(idx.begin(), idx.end());
            s.products_.push_back({std::move(idx), pc.sign});
            s.product_specs_.push_back(std::move(pc));
        }
        if (state) {
            s.state_ = Density::from_matrix(*state, t);
            require_same_dim(s.state_->mat(), identity(dim));
        }
        return s;
    }

    const std::string &name() const { return name_; }
    Eigen::Index dim() const { return dim_; }
    const std::vector<ScenarioItem> &items() const { return items_; }
    const std::vector<std::vector<std::size_t>> &contexts() const { return contexts_; }
    const std::vector<ProductConstraint> &product_specs() const { return product_specs_; }
    const std::optional<Density> &state() const { return state_; }
    const Tolerance &tolerance() const { return tol_; }

    std::size_t index_of(const std::string &label) const {
        auto it = index_.find(label);
        if (it == index_.end()) {
            throw LabError(ErrorKind::UnregisteredObservable, "'" + label + "'");
        }
        return it->second;
    }

    /// True when the context holds only projectors summing to I.
    bool resolves_identity(std::size_t ctx) const {
        CMat sum = CMat::Zero(dim_, dim_);
        for (auto i : contexts_[ctx]) {
            if (items_[i].kind != ItemKind::Projector) {
                return false;
            }
            sum += items_[i].mat;
        }
        return op_norm(sum - identity(dim_)) <= tol_.tol;
    }

    Scenario with_state(const Density &d) const {
        require_same_dim(d.mat(), identity(dim_));
        Scenario s = *this;
        s.state_ = d;
        return s;
    }

    struct IndexedProduct {
        std::vector<std::size_t> items;
        int sign;
    };
    const std::vector<IndexedProduct> &products() const { return products_; }

  private:
    static std::string join(const std::vector<std::string> &v) {
        std::string out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            out += (i ? "*" : "") + v[i];
        }
        return out;
    }

    static ScenarioItem make_item(ItemSpec spec, const Tolerance &t) {
        require_square_finite(spec.mat, spec.label);
        ScenarioItem item{std::move(spec.label), spec.kind, std::move(spec.mat), {}, {}};
        if (item.kind == ItemKind::Projector) {
            Projector::from_matrix(item.mat, t);
        } else {
            const double herm = hermitian_residual(item.mat);
            const double sq = op_norm(item.mat * item.mat - identity(item.mat.rows()));
            if (herm > t.tol || sq > t.tol) {
                throw LabError(ErrorKind::NotDichotomic, "'" + item.label + "': eigenvalues are not +-1");
            }
        }
        const Observable obs = Observable::from_matrix(item.mat, t);
        const auto &terms = obs.resolution().terms;
        for (auto it = terms.rbegin(); it != terms.rend(); ++it) {  // ascending eigenvalue
            item.spectrum.push_back(static_cast<int>(std::lround(it->eigenvalue.real())));
            item.value_projectors.push_back(it->projector);
        }
        return item;
    }

    void require_commuting(const std::vector<std::size_t> &idx) const {
        for (std::size_t a = 0; a < idx.size(); ++a) {
            for (std::size_t b = a + 1; b < idx.size(); ++b) {
                const double c = commutator_norm(items_[idx[a]].mat, items_[idx[b]].mat);
                if (c > tol_.tol) {
                    throw LabError(ErrorKind::NotCommuting, "'" + items_[idx[a]].label + "' and '" +
                                                                items_[idx[b]].label +
                                                                "' share a context but do not commute (" +
                                                                std::to_string(c) + ")");
                }
            }
        }
    }

    std::string name_;
    Eigen::Index dim_ = 0;
    Tolerance tol_;
    std::vector<ScenarioItem> items_;
    std::map<std::string, std::size_t> index_;
    std::vector<std::vector<std::size_t>> contexts_;
    std::vector<IndexedProduct> products_;
    std::vector<ProductConstraint> product_specs_;
    std::optional<Density> state_;
};

/// One value per scenario item, in the scenario's item order.
struct AssignmentTable {
    std::vector<int> values;
    friend auto operator<=>(const AssignmentTable &, const AssignmentTable &) = default;
};

inline constexpr std::uint64_t kDefaultSearchLimit = std::uint64_t{1} << 24;

namespace detail {

/// Value tuples of a commuting context whose joint spectral projector is nonzero.
inline std::set<std::vector<int>> admissible_local_tuples(const Scenario &s, const std::vector<std::size_t> &ctx) {
    std::set<std::vector<int>> out;
    std::vector<std::size_t> pos(ctx.size(), 0);
    for (;;) {
        CMat joint = identity(s.dim());
        std::vector<int> tuple;
        for (std::size_t k = 0; k < ctx.size(); ++k) {
            const auto &item = s.items()[ctx[k]];
            joint = joint * item.value_projectors[pos[k]];
            tuple.push_back(item.spectrum[pos[k]]);
        }
        if (op_norm(joint) > 0.5) {
            out.insert(std::move(tuple));
        }
        std::size_t k = 0;
        while (k < ctx.size() && ++pos[k] == s.items()[ctx[k]].spectrum.size()) {
            pos[k++] = 0;
        }
        if (k == ctx.size()) {
            break;
        }
    }
    return out;
}

}  // namespace detail

/// All value assignments obeying the spectrum rule and, inside every context,
/// the functional rules: the joint spectral projector of the assigned values
/// is nonzero (product rule; exactly one 1 on a resolution of identity) and
/// every declared product holds. Output is lexicographic in item order.
inline std::vector<AssignmentTable> enumerate_assignments(const Scenario &s,
                                                          std::uint64_t limit = kDefaultSearchLimit) {
    const auto &items = s.items();
    const std::size_t n = items.size();
    double space = 1.0;
    for (const auto &it : items) {
        space *= static_cast<double>(it.spectrum.size());
    }
    if (space > static_cast<double>(limit)) {
        throw LabError(ErrorKind::SearchSpaceTooLarge,
                       "assignment space " + std::to_string(space) + " exceeds " + std::to_string(limit));
    }

    struct Rule {
        std::vector<std::size_t> items;
        std::set<std::vector<int>> allowed;  // empty with sign != 0 means product rule
        int sign = 0;
    };
    std::vector<std::vector<Rule>> due(n);
    for (const auto &ctx : s.contexts()) {
        if (!ctx.empty()) {
            due[ctx.back()].push_back({ctx, detail::admissible_local_tuples(s, ctx), 0});
        }
    }
    for (const auto &pc : s.products()) {
        if (!pc.items.empty()) {
            due[pc.items.back()].push_back({pc.items, {}, pc.sign});
        }
    }

    std::vector<AssignmentTable> out;
    if (n == 0) {
        out.push_back({});
        return out;
    }
    std::vector<int> values(n, 0);
    std::vector<std::size_t> pos(n, 0);
    std::vector<int> local;
    auto ok_at = [&](std::size_t k) {
        for (const auto &rule : due[k]) {
            local.clear();
            for (auto i : rule.items) {
                local.push_back(values[i]);
            }
            if (rule.sign != 0) {
                int prod = 1;
                for (int v : local) {
                    prod *= v;
                }
                if (prod != rule.sign) {
                    return false;
                }
            } else if (!rule.allowed.count(local)) {
                return false;
            }
        }
        return true;
    };
    // iterative depth-first search over positions
    std::size_t k = 0;
    pos[0] = 0;
    for (;;) {
        if (pos[k] == items[k].spectrum.size()) {
            if (k == 0) {
                break;
            }
            pos[k] = 0;
            --k;
            ++pos[k];
            continue;
        }
        values[k] = items[k].spectrum[pos[k]];
        if (!ok_at(k)) {
            ++pos[k];
            continue;
        }
        if (k + 1 == n) {
            out.push_back({values});
            ++pos[k];
        } else {
            ++k;
            pos[k] = 0;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// CHSH quantities

struct ChshRoles {
    std::size_t a, a_prime, b, b_prime;
};

/// Detects the 2x2 dichotomic shape: four ±1 items, four two-item contexts
/// forming the cycle A-B-A'-B'. A is the first item by label, B and B' its
/// context partners in label order.
inline std::optional<ChshRoles> chsh_roles(const Scenario &s) {
    if (s.items().size() != 4 || s.contexts().size() != 4) {
        return std::nullopt;
    }
    for (const auto &it : s.items()) {
        if (it.kind != ItemKind::Dichotomic) {
            return std::nullopt;
        }
    }
    std::array<std::set<std::size_t>, 4> nb;
    std::set<std::pair<std::size_t, std::size_t>> edges;
    for (const auto &ctx : s.contexts()) {
        if (ctx.size() != 2 || !edges.insert({ctx[0], ctx[1]}).second) {
            return std::nullopt;
        }
        nb[ctx[0]].insert(ctx[1]);
        nb[ctx[1]].insert(ctx[0]);
    }
    if (nb[0].size() != 2) {
        return std::nullopt;
    }
    ChshRoles r{0, 0, *nb[0].begin(), *std::next(nb[0].begin())};
    for (std::size_t i = 1; i < 4; ++i) {
        if (i != r.b && i != r.b_prime) {
            r.a_prime = i;
        }
    }
    if (nb[r.a_prime] != nb[0] || nb[r.b] != nb[r.b_prime]) {
        return std::nullopt;
    }
    return r;
}

/// Correlators E(A,B), E(A,B'), E(A',B), E(A',B') with E(X,Y) = tr[D XY].
struct Correlators {
    double ab = 0, ab_p = 0, a_pb = 0, a_pb_p = 0;
};

/// The four CHSH sign placements; form k carries the minus sign on term k of
/// (E(A,B), E(A,B'), E(A',B), E(A',B')). Form 3 is the standard S.
inline std::array<double, 4> chsh_forms(const Correlators &e) {
    const double sum = e.ab + e.ab_p + e.a_pb + e.a_pb_p;
    return {sum - 2 * e.ab, sum - 2 * e.ab_p, sum - 2 * e.a_pb, sum - 2 * e.a_pb_p};
}

/// max_k |S_k|: all eight BCH inequalities hold iff this is <= 2.
inline double bch_max(const Correlators &e) {
    double m = 0.0;
    for (double v : chsh_forms(e)) {
        m = std::max(m, std::abs(v));
    }
    return m;
}

inline Correlators chsh_correlators(const CMat &state, const CMat &a, const CMat &a_prime, const CMat &b,
                                    const CMat &b_prime, const Tolerance &t = {}) {
    const CMat *obs[] = {&a, &a_prime, &b, &b_prime};
    const char *names[] = {"A", "A'", "B", "B'"};
    for (int i = 0; i < 4; ++i) {
        require_same_dim(state, *obs[i]);
        const double herm = hermitian_residual(*obs[i]);
        const double sq = op_norm((*obs[i]) * (*obs[i]) - identity(state.rows()));
        if (herm > t.tol || sq > t.tol) {
            throw LabError(ErrorKind::NotDichotomic, std::string(names[i]) + " does not have eigenvalues +-1");
        }
    }
    for (int i = 0; i < 2; ++i) {
        for (int j = 2; j < 4; ++j) {
            const double c = commutator_norm(*obs[i], *obs[j]);
            if (c > t.tol) {
                throw LabError(ErrorKind::CrossTalk, std::string(names[i]) + " and " + names[j] +
                                                         " fail to commute (" + std::to_string(c) + ")");
            }
        }
    }
    auto corr = [&](const CMat &x, const CMat &y) { return trace_inner(state, x * y).real(); };
    return {corr(a, b), corr(a, b_prime), corr(a_prime, b), corr(a_prime, b_prime)};
}

/// S = E(A,B) + E(A,B') + E(A',B) - E(A',B').
inline double chsh_value(const Density &state, const CMat &a, const CMat &a_prime, const CMat &b,
                         const CMat &b_prime, const Tolerance &t = {}) {
    return chsh_forms(chsh_correlators(state.mat(), a, a_prime, b, b_prime, t))[3];
}

/// max |ab + ab' + a'b - a'b'| over the 16 deterministic ±1 strategies, exact.
inline Rational classical_chsh_bound(const Scenario &s) {
    if (!chsh_roles(s)) {
        throw LabError(ErrorKind::WrongScenarioShape, "scenario '" + s.name() + "' is not a 2x2 dichotomic scenario");
    }
    Rational best = 0;
    for (int mask = 0; mask < 16; ++mask) {
        const Rational a = (mask & 1) ? 1 : -1;
        const Rational ap = (mask & 2) ? 1 : -1;
        const Rational b = (mask & 4) ? 1 : -1;
        const Rational bp = (mask & 8) ? 1 : -1;
        Rational v = a * b + a * bp + ap * b - ap * bp;
        if (v < 0) {
            v = -v;
        }
        best = std::max(best, v);
    }
    return best;
}

// ---------------------------------------------------------------------------
// Feasibility

enum class FeasibilityStatus { Feasible, Infeasible, NoAdmissibleAssignments };

inline std::string_view to_string(FeasibilityStatus s) {
    switch (s) {
        case FeasibilityStatus::Feasible: return "feasible";
        case FeasibilityStatus::Infeasible: return "infeasible";
        case FeasibilityStatus::NoAdmissibleAssignments: return "no-admissible-assignments";
    }
    return "infeasible";
}

/// One linear constraint on the assignment distribution:
/// sum over assignments t with incidence[t] = 1 of w_t equals target.
struct ConstraintRow {
    std::string name;
    std::vector<std::uint8_t> incidence;
    double quantum = 0.0;
    Rational target = 0;
    bool independent = true;
};

struct WeightedAssignment {
    AssignmentTable table;
    Rational weight;
};

struct ViolatedConstraint {
    std::string name;
    std::string expression;
    double quantum_side = 0.0;
    double classical_bound = 0.0;
};

struct FeasibilityResult {
    FeasibilityStatus status = FeasibilityStatus::Infeasible;
    std::vector<AssignmentTable> assignments;
    std::vector<WeightedAssignment> certificate;
    std::optional<ViolatedConstraint> violated;
    std::vector<ConstraintRow> constraints;
    /// Feasible: largest weight every admissible assignment away from
    /// zero-probability events can keep. Infeasible: ∞-distance from the data
    /// to the nearest classical point.
    double robustness = 0.0;
};

struct FeasibilityOptions {
    std::int64_t denominator = 1'000'000'000;
    double margin = 1e-6;
    std::uint64_t search_limit = kDefaultSearchLimit;
};

namespace detail {

inline Rational rationalize(double v, std::int64_t denominator) {
    return Rational(static_cast<long long>(std::llround(v * static_cast<double>(denominator))),
                    static_cast<long long>(denominator));
}

inline double to_double(const Rational &r) { return r.convert_to<double>(); }

inline std::string fmt_value(int v) { return std::to_string(v); }

/// Rows: normalization, marginals per item and eigenvalue, joints per
/// in-context pair and eigenvalue pair.
inline std::vector<ConstraintRow> build_rows(const Scenario &s, const std::vector<AssignmentTable> &assignments) {
    const auto &items = s.items();
    const Density &d = *s.state();
    const std::size_t n = assignments.size();
    std::vector<ConstraintRow> rows;
    rows.push_back({"total", std::vector<std::uint8_t>(n, 1), 1.0});
    for (std::size_t i = 0; i < items.size(); ++i) {
        for (std::size_t v = 0; v < items[i].spectrum.size(); ++v) {
            ConstraintRow row{"P(" + items[i].label + "=" + fmt_value(items[i].spectrum[v]) + ")",
                              std::vector<std::uint8_t>(n, 0), d.expectation(items[i].value_projectors[v])};
            for (std::size_t t = 0; t < n; ++t) {
                row.incidence[t] = assignments[t].values[i] == items[i].spectrum[v];
            }
            rows.push_back(std::move(row));
        }
    }
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (const auto &ctx : s.contexts()) {
        for (std::size_t x = 0; x < ctx.size(); ++x) {
            for (std::size_t y = x + 1; y < ctx.size(); ++y) {
                const auto i = ctx[x], j = ctx[y];
                if (!seen.insert({i, j}).second) {
                    continue;
                }
                for (std::size_t v = 0; v < items[i].spectrum.size(); ++v) {
                    for (std::size_t w = 0; w < items[j].spectrum.size(); ++w) {
                        const CMat joint = items[i].value_projectors[v] * items[j].value_projectors[w];
                        ConstraintRow row{"P(" + items[i].label + "=" + fmt_value(items[i].spectrum[v]) + ", " +
                                              items[j].label + "=" + fmt_value(items[j].spectrum[w]) + ")",
                                          std::vector<std::uint8_t>(n, 0), d.expectation(joint)};
                        for (std::size_t t = 0; t < n; ++t) {
                            row.incidence[t] = assignments[t].values[i] == items[i].spectrum[v] &&
                                               assignments[t].values[j] == items[j].spectrum[w];
                        }
                        rows.push_back(std::move(row));
                    }
                }
            }
        }
    }
    return rows;
}

struct Dependency {
    std::size_t row;
    std::vector<std::pair<std::size_t, Rational>> combination;  // row = sum c_k row_k
};

/// Exact row reduction over the incidence rows; marks rows spanned by earlier
/// rows as dependent and records the combination.
inline std::vector<Dependency> find_dependencies(std::vector<ConstraintRow> &rows) {
    const std::size_t m = rows.size();
    struct Reduced {
        std::size_t pivot;
        std::vector<Rational> vec;
        std::vector<Rational> rep;
    };
    std::vector<Reduced> basis;
    std::vector<Dependency> deps;
    for (std::size_t i = 0; i < m; ++i) {
        std::vector<Rational> v(rows[i].incidence.begin(), rows[i].incidence.end());
        std::vector<Rational> rep(m, Rational(0));
        rep[i] = 1;
        for (const auto &b : basis) {
            if (v[b.pivot] == 0) {
                continue;
            }
            const Rational f = v[b.pivot] / b.vec[b.pivot];
            for (std::size_t j = 0; j < v.size(); ++j) {
                if (b.vec[j] != 0) {
                    v[j] -= f * b.vec[j];
                }
            }
            for (std::size_t k = 0; k < m; ++k) {
                if (b.rep[k] != 0) {
                    rep[k] -= f * b.rep[k];
                }
            }
        }
        auto nz = std::find_if(v.begin(), v.end(), [](const Rational &x) { return x != 0; });
        if (nz == v.end()) {
            rows[i].independent = false;
            Dependency dep{i, {}};
            for (std::size_t k = 0; k < m; ++k) {
                if (k != i && rep[k] != 0) {
                    dep.combination.push_back({k, -rep[k]});
                }
            }
            deps.push_back(std::move(dep));
        } else {
            basis.push_back({static_cast<std::size_t>(nz - v.begin()), std::move(v), std::move(rep)});
        }
    }
    return deps;
}

inline std::string combination_string(const std::vector<ConstraintRow> &rows,
                                      const std::vector<std::pair<std::size_t, Rational>> &comb) {
    std::string out;
    for (const auto &[k, c] : comb) {
        const double cv = to_double(c);
        char buf[48];
        std::snprintf(buf, sizeof buf, "%s%.6g*", out.empty() ? (cv < 0 ? "-" : "") : (cv < 0 ? " - " : " + "),
                      std::abs(cv));
        out += buf + rows[k].name;
    }
    return out.empty() ? "0" : out;
}

}  // namespace detail

/// Decides whether a distribution over admissible value assignments
/// reproduces every quantum marginal and in-context joint probability.
/// Quantum values are rounded to `denominator` and the linear feasibility
/// problem is solved exactly. Results within `margin` of the decision
/// boundary raise NumericalAmbiguity.
inline FeasibilityResult hv_feasibility(const Scenario &s, const FeasibilityOptions &opts = {}) {
    FeasibilityResult out;
    out.assignments = enumerate_assignments(s, opts.search_limit);
    if (out.assignments.empty()) {
        out.status = FeasibilityStatus::NoAdmissibleAssignments;
        out.violated = ViolatedConstraint{"context rules", "no value assignment satisfies every context", 0.0, 0.0};
        return out;
    }
    if (!s.state()) {
        throw LabError(ErrorKind::MissingState, "scenario '" + s.name() + "' has no state");
    }
    const std::size_t n = out.assignments.size();
    auto &rows = out.constraints;
    rows = detail::build_rows(s, out.assignments);
    for (auto &r : rows) {
        r.target = detail::rationalize(r.quantum, opts.denominator);
    }
    rows[0].target = 1;

    // Dependent rows: consistent data is completed exactly; inconsistent data
    // is already a refutation.
    const auto deps = detail::find_dependencies(rows);
    for (const auto &dep : deps) {
        double combo = 0.0;
        double weight = 1.0;
        Rational exact = 0;
        for (const auto &[k, c] : dep.combination) {
            combo += detail::to_double(c) * rows[k].quantum;
            weight += std::abs(detail::to_double(c));
            exact += c * rows[k].target;
        }
        const double gap = std::abs(rows[dep.row].quantum - combo);
        if (gap > opts.margin) {
            out.status = FeasibilityStatus::Infeasible;
            out.robustness = gap / weight;
            out.violated = ViolatedConstraint{rows[dep.row].name + " = " + detail::combination_string(rows, dep.combination),
                                              "identity holding on every admissible assignment",
                                              rows[dep.row].quantum, combo};
            return out;
        }
        if (gap > 1e-9 * weight) {
            throw LabError(ErrorKind::NumericalAmbiguity,
                           "dependency on " + rows[dep.row].name + " off by " + std::to_string(gap));
        }
        rows[dep.row].target = exact;
    }

    std::vector<std::size_t> indep;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].independent) {
            indep.push_back(i);
        }
    }
    std::vector<std::vector<Rational>> a;
    std::vector<Rational> b;
    for (auto i : indep) {
        a.emplace_back(rows[i].incidence.begin(), rows[i].incidence.end());
        b.push_back(rows[i].target);
    }
    const LpResult lp = solve_lp(a, b);

    if (lp.status == LpStatus::Optimal) {
        out.status = FeasibilityStatus::Feasible;
        for (std::size_t t = 0; t < n; ++t) {
            if (lp.x[t] != 0) {
                out.certificate.push_back({out.assignments[t], lp.x[t]});
            }
        }
        // Depth: maximize λ with w_t = λ + u_t on assignments that avoid
        // every zero-probability event.
        std::vector<std::uint8_t> free(n, 1);
        for (std::size_t i = 1; i < rows.size(); ++i) {
            if (rows[i].quantum <= opts.margin) {
                for (std::size_t t = 0; t < n; ++t) {
                    if (rows[i].incidence[t]) {
                        free[t] = 0;
                    }
                }
            }
        }
        const auto n_free = static_cast<std::size_t>(std::count(free.begin(), free.end(), 1));
        if (n_free > 0) {
            std::vector<std::vector<Rational>> a2 = a;
            for (auto &row : a2) {
                Rational s_free = 0;
                for (std::size_t t = 0; t < n; ++t) {
                    if (free[t]) {
                        s_free += row[t];
                    }
                }
                row.push_back(s_free);
            }
            std::vector<Rational> c(n + 1, Rational(0));
            c[n] = 1;
            const LpResult depth = solve_lp(a2, b, c);
            out.robustness = detail::to_double(depth.objective);
            if (out.robustness < opts.margin / static_cast<double>(n)) {
                throw LabError(ErrorKind::NumericalAmbiguity,
                               "feasible point lies within the margin of a facet (depth " +
                                   std::to_string(out.robustness) + ")");
            }
        } else {
            out.robustness = 1.0;
        }
        return out;
    }

    out.status = FeasibilityStatus::Infeasible;
    // ∞-distance to the classical set: minimize τ with |A_i w - b_i| <= τ on
    // every independent row except the normalization.
    {
        const std::size_t m = indep.size();
        const std::size_t cols = n + 1 + 2 * (m - 1);
        std::vector<std::vector<Rational>> a3;
        std::vector<Rational> b3;
        std::vector<Rational> row0(cols, Rational(0));
        for (std::size_t t = 0; t < n; ++t) {
            row0[t] = a[0][t];
        }
        a3.push_back(row0);
        b3.push_back(b[0]);
        for (std::size_t r = 1; r < m; ++r) {
            std::vector<Rational> up(cols, Rational(0)), down(cols, Rational(0));
            for (std::size_t t = 0; t < n; ++t) {
                up[t] = a[r][t];
                down[t] = -a[r][t];
            }
            up[n] = -1;
            down[n] = -1;
            up[n + 1 + 2 * (r - 1)] = 1;
            down[n + 2 + 2 * (r - 1)] = 1;
            a3.push_back(std::move(up));
            b3.push_back(b[r]);
            a3.push_back(std::move(down));
            b3.push_back(-b[r]);
        }
        std::vector<Rational> c(cols, Rational(0));
        c[n] = -1;
        const LpResult dist = solve_lp(a3, b3, c);
        out.robustness = -detail::to_double(dist.objective);
    }

    if (auto roles = chsh_roles(s)) {
        const auto &it = s.items();
        const Correlators e = chsh_correlators(s.state()->mat(), it[roles->a].mat, it[roles->a_prime].mat,
                                               it[roles->b].mat, it[roles->b_prime].mat, s.tolerance());
        const auto forms = chsh_forms(e);
        std::size_t k = 0;
        for (std::size_t i = 1; i < 4; ++i) {
            if (std::abs(forms[i]) > std::abs(forms[k])) {
                k = i;
            }
        }
        const std::string A = it[roles->a].label, Ap = it[roles->a_prime].label, B = it[roles->b].label,
                          Bp = it[roles->b_prime].label;
        const std::string terms[4] = {"E(" + A + "," + B + ")", "E(" + A + "," + Bp + ")", "E(" + Ap + "," + B + ")",
                                      "E(" + Ap + "," + Bp + ")"};
        std::string expr = forms[k] < 0 ? "-(" : "";
        for (std::size_t i = 0; i < 4; ++i) {
            expr += (i == k ? (i ? " - " : "-") : (i ? " + " : "")) + terms[i];
        }
        expr += forms[k] < 0 ? ") <= 2" : " <= 2";
        out.violated = ViolatedConstraint{"BCH (CHSH form)", expr, std::abs(forms[k]), 2.0};
    } else {
        // Farkas aggregate: y.A_t <= 0 for all assignments, y.b > 0.
        double quantum = 0.0;
        std::vector<std::pair<std::size_t, Rational>> comb;
        for (std::size_t r = 0; r < indep.size(); ++r) {
            if (lp.farkas[r] != 0) {
                comb.push_back({indep[r], lp.farkas[r]});
                quantum += detail::to_double(lp.farkas[r]) * rows[indep[r]].quantum;
            }
        }
        Rational classical = 0;
        bool first = true;
        for (std::size_t t = 0; t < n; ++t) {
            Rational v = 0;
            for (std::size_t r = 0; r < indep.size(); ++r) {
                if (a[r][t] != 0) {
                    v += lp.farkas[r];
                }
            }
            if (first || v > classical) {
                classical = v;
                first = false;
            }
        }
        out.violated = ViolatedConstraint{"aggregate", detail::combination_string(rows, comb) + " <= " +
                                                            std::to_string(detail::to_double(classical)),
                                          quantum, detail::to_double(classical)};
    }
    if (out.robustness <= opts.margin) {
        throw LabError(ErrorKind::NumericalAmbiguity,
                       "data lies within " + std::to_string(out.robustness) + " of a classical point");
    }
    return out;
}

/// Pushes a certificate forward onto every constraint row, exactly.
inline std::vector<Rational> push_forward(const FeasibilityResult &r) {
    std::vector<Rational> out(r.constraints.size(), Rational(0));
    for (const auto &wa : r.certificate) {
        const auto t = static_cast<std::size_t>(
            std::lower_bound(r.assignments.begin(), r.assignments.end(), wa.table) - r.assignments.begin());
        for (std::size_t i = 0; i < r.constraints.size(); ++i) {
            if (r.constraints[i].incidence[t]) {
                out[i] += wa.weight;
            }
        }
    }
    return out;
}

}  // namespace nogo_lab
