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
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nogo_lab/quantum.hpp"
#include "nogo_lab/random.hpp"
#include "nogo_lab/report.hpp"

namespace nogo_lab {

/// Finite probability space: labelled points with nonnegative weights.
/// Normalization is not enforced here; it is the full-spectrum instance of
/// the marginal rule and gets reported by the checkers.
class PhaseSpace {
  public:
    static PhaseSpace make(std::vector<std::string> labels, std::vector<double> weights) {
        if (labels.size() != weights.size() || labels.empty()) {
            throw LabError(ErrorKind::InvalidPhaseSpace, "need one weight per point and at least one point");
        }
        for (std::size_t i = 0; i < weights.size(); ++i) {
            if (!std::isfinite(weights[i]) || weights[i] < 0.0) {
                throw LabError(ErrorKind::InvalidPhaseSpace,
                               "weight of '" + labels[i] + "' is " + std::to_string(weights[i]));
            }
        }
        return PhaseSpace(std::move(labels), std::move(weights));
    }

    std::size_t size() const { return labels_.size(); }
    const std::vector<std::string> &labels() const { return labels_; }
    const std::vector<double> &weights() const { return weights_; }
    double total() const {
        double s = 0.0;
        for (double w : weights_) {
            s += w;
        }
        return s;
    }

  private:
    PhaseSpace(std::vector<std::string> labels, std::vector<double> weights)
        : labels_(std::move(labels)), weights_(std::move(weights)) {}

    std::vector<std::string> labels_;
    std::vector<double> weights_;
};

/// Subset of phase-space points, kept sorted.
struct Event {
    std::vector<std::size_t> points;

    bool contains(std::size_t p) const { return std::binary_search(points.begin(), points.end(), p); }

    Event intersect(const Event &other) const {
        Event out;
        std::set_intersection(points.begin(), points.end(), other.points.begin(), other.points.end(),
                              std::back_inserter(out.points));
        return out;
    }

    double measure(const PhaseSpace &space) const {
        double s = 0.0;
        for (auto p : points) {
            s += space.weights()[p];
        }
        return s;
    }

    friend bool operator==(const Event &, const Event &) = default;
};

struct RegisteredItem {
    std::string label;
    Observable observable;
};

enum class CompoundKind { Sum, Product };

/// Declares that item `result` holds the matrix a+b (or ab).
struct Compound {
    CompoundKind kind;
    std::string a;
    std::string b;
    std::string result;
};

/// The value assignment f(ω, A): one row per point, one column per item.
class ValueMap {
  public:
    ValueMap() = default;
    ValueMap(std::vector<RegisteredItem> items, std::vector<std::vector<double>> table,
             std::vector<Compound> compounds = {})
        : items_(std::move(items)), table_(std::move(table)), compounds_(std::move(compounds)) {
        for (std::size_t i = 0; i < items_.size(); ++i) {
            if (!index_.emplace(items_[i].label, i).second) {
                throw LabError(ErrorKind::InvalidScenario, "duplicate label '" + items_[i].label + "'");
            }
        }
        for (const auto &row : table_) {
            if (row.size() != items_.size()) {
                throw LabError(ErrorKind::DimensionMismatch, "value table row has " + std::to_string(row.size()) +
                                                                 " entries for " + std::to_string(items_.size()) +
                                                                 " items");
            }
        }
        for (const auto &c : compounds_) {
            index_of(c.a);
            index_of(c.b);
            index_of(c.result);
        }
    }

    std::size_t index_of(const std::string &label) const {
        auto it = index_.find(label);
        if (it == index_.end()) {
            throw LabError(ErrorKind::UnregisteredObservable, "'" + label + "'");
        }
        return it->second;
    }
    bool has(const std::string &label) const { return index_.count(label) != 0; }

    const std::vector<RegisteredItem> &items() const { return items_; }
    const RegisteredItem &item(const std::string &label) const { return items_[index_of(label)]; }
    const std::vector<std::vector<double>> &table() const { return table_; }
    const std::vector<Compound> &compounds() const { return compounds_; }
    double value(std::size_t point, std::size_t item) const { return table_[point][item]; }

  private:
    std::vector<RegisteredItem> items_;
    std::vector<std::vector<double>> table_;
    std::vector<Compound> compounds_;
    std::map<std::string, std::size_t> index_;
};

/// Deterministic hidden-variable model: (Ω, μ), value map f, quantum state D.
class HVModel {
  public:
    HVModel(PhaseSpace space, ValueMap values, Density state, Tolerance tol = {})
        : space_(std::move(space)), values_(std::move(values)), state_(std::move(state)), tol_(tol) {
        if (values_.table().size() != space_.size()) {
            throw LabError(ErrorKind::DimensionMismatch, "value table has " +
                                                             std::to_string(values_.table().size()) +
                                                             " rows for " + std::to_string(space_.size()) + " points");
        }
        for (const auto &it : values_.items()) {
            if (it.observable.dim() != state_.dim()) {
                throw LabError(ErrorKind::DimensionMismatch, "item '" + it.label + "' has dim " +
                                                                 std::to_string(it.observable.dim()) +
                                                                 ", state has " + std::to_string(state_.dim()));
            }
        }
    }

    const PhaseSpace &space() const { return space_; }
    const ValueMap &values() const { return values_; }
    const Density &state() const { return state_; }
    const Tolerance &tolerance() const { return tol_; }

  private:
    PhaseSpace space_;
    ValueMap values_;
    Density state_;
    Tolerance tol_;
};

/// {ω : f(ω, X) = v}, equality up to the cluster gap.
inline Event preimage(const HVModel &m, const std::string &label, double v) {
    const auto col = m.values().index_of(label);
    Event e;
    for (std::size_t p = 0; p < m.space().size(); ++p) {
        if (std::abs(m.values().value(p, col) - v) <= m.tolerance().cluster_gap) {
            e.points.push_back(p);
        }
    }
    return e;
}

/// {ω : f(ω, X) ∈ S}.
inline Event preimage(const HVModel &m, const std::string &label, const EigenvalueSet &s) {
    Event out;
    for (double v : s.values) {
        const Event e = preimage(m, label, v);
        std::vector<std::size_t> merged;
        std::set_union(out.points.begin(), out.points.end(), e.points.begin(), e.points.end(),
                       std::back_inserter(merged));
        out.points = std::move(merged);
    }
    return out;
}

namespace detail {

inline std::string set_string(const EigenvalueSet &s) {
    std::string out = "{";
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6g", s.values[i]);
        out += (i ? ", " : "") + std::string(buf);
    }
    return out + "}";
}

inline bool is_projector_spectrum(const Observable &o, double gap) {
    for (double v : o.eigenvalues()) {
        if (std::abs(v) > gap && std::abs(v - 1.0) > gap) {
            return false;
        }
    }
    return true;
}

inline void require_commuting(const HVModel &m, const std::string &a, const std::string &b) {
    const double c = commutator_norm(m.values().item(a).observable.mat(), m.values().item(b).observable.mat());
    if (c > m.tolerance().tol) {
        throw LabError(ErrorKind::NotCommuting,
                       "'" + a + "' and '" + b + "' have commutator norm " + std::to_string(c));
    }
}

inline Projector as_projector(const HVModel &m, const std::string &label) {
    const auto &obs = m.values().item(label).observable;
    if (!is_projector_spectrum(obs, m.tolerance().cluster_gap)) {
        throw LabError(ErrorKind::NotProjector, "'" + label + "' is not a projector");
    }
    return Projector::from_matrix(obs.mat(), m.tolerance());
}

}  // namespace detail

/// Every table entry must be an eigenvalue of its observable.
inline CheckReport check_spectrum_rule(const HVModel &m) {
    CheckReport r{"spectrum_rule", "HV(a)"};
    const auto &items = m.values().items();
    for (std::size_t p = 0; p < m.space().size(); ++p) {
        for (std::size_t i = 0; i < items.size(); ++i) {
            const double v = m.values().value(p, i);
            double dist = INFINITY;
            for (double e : items[i].observable.eigenvalues()) {
                dist = std::min(dist, std::abs(v - e));
            }
            r.residual = std::max(r.residual, dist);
            if (!(dist <= m.tolerance().cluster_gap)) {
                r.violations.push_back("f(" + m.space().labels()[p] + ", " + items[i].label +
                                       ") = " + std::to_string(v) + " is not an eigenvalue");
            }
        }
    }
    r.pass = r.violations.empty();
    return r;
}

namespace detail {

inline CheckReport check_compound(const HVModel &m, const std::string &a, const std::string &b,
                                  const std::string &result, CompoundKind kind) {
    require_commuting(m, a, b);
    const auto &vm = m.values();
    const CMat &ma = vm.item(a).observable.mat();
    const CMat &mb = vm.item(b).observable.mat();
    const CMat expected = kind == CompoundKind::Sum ? CMat(ma + mb) : CMat(ma * mb);
    const double mismatch = op_norm(vm.item(result).observable.mat() - expected);
    if (mismatch > m.tolerance().tol) {
        throw LabError(ErrorKind::UnregisteredObservable, "'" + result + "' does not hold " + a +
                                                              (kind == CompoundKind::Sum ? "+" : "*") + b);
    }
    const bool sum = kind == CompoundKind::Sum;
    CheckReport r{std::string(sum ? "sum_rule(" : "product_rule(") + a + ", " + b + ")",
                  sum ? "HV(b)" : "product-rule"};
    const auto ia = vm.index_of(a), ib = vm.index_of(b), ic = vm.index_of(result);
    for (std::size_t p = 0; p < m.space().size(); ++p) {
        const double fa = vm.value(p, ia), fb = vm.value(p, ib), fc = vm.value(p, ic);
        const double gap = std::abs(fc - (sum ? fa + fb : fa * fb));
        r.residual = std::max(r.residual, gap);
        if (!(gap <= m.tolerance().tol)) {
            r.violations.push_back("at " + m.space().labels()[p] + ": f(" + result + ") = " + std::to_string(fc));
        }
    }
    r.pass = r.violations.empty();
    return r;
}

}  // namespace detail

/// f(ω, A+B) = f(ω, A) + f(ω, B) for commuting A, B; `sum_label` names the
/// registered item holding A+B.
inline CheckReport check_sum_rule(const HVModel &m, const std::string &a, const std::string &b,
                                  const std::string &sum_label) {
    return detail::check_compound(m, a, b, sum_label, CompoundKind::Sum);
}

/// (AB)(ω) = A(ω) B(ω) for commuting A, B.
inline CheckReport check_product_rule(const HVModel &m, const std::string &a, const std::string &b,
                                      const std::string &product_label) {
    return detail::check_compound(m, a, b, product_label, CompoundKind::Product);
}

/// μ{ω : f(ω, A) ∈ S} against tr[D P_A(S)].
inline CheckReport check_marginal_rule(const HVModel &m, const std::string &a, const EigenvalueSet &s) {
    const auto &obs = m.values().item(a).observable;
    const Projector pa = spectral_projector(obs, s, m.tolerance());
    CheckReport r{"marginal_rule(" + a + ", " + detail::set_string(s) + ")", "HV(c)"};
    r.model_value = preimage(m, a, s).measure(m.space());
    r.quantum_value = m.state().expectation(pa.mat());
    r.residual = std::abs(*r.model_value - *r.quantum_value);
    r.pass = r.residual <= m.tolerance().tol;
    if (!r.pass) {
        r.violations.push_back("mu = " + std::to_string(*r.model_value) + ", tr = " + std::to_string(*r.quantum_value));
    }
    return r;
}

/// μ(A∈S ∩ B∈T) against tr[D P_A(S) P_B(T)] for commuting A, B.
inline CheckReport check_joint_rule(const HVModel &m, const std::string &a, const EigenvalueSet &s,
                                    const std::string &b, const EigenvalueSet &t) {
    detail::require_commuting(m, a, b);
    const Projector pa = spectral_projector(m.values().item(a).observable, s, m.tolerance());
    const Projector pb = spectral_projector(m.values().item(b).observable, t, m.tolerance());
    CheckReport r{"joint_rule(" + a + " in " + detail::set_string(s) + ", " + b + " in " + detail::set_string(t) + ")",
                  "HV(d)"};
    r.model_value = preimage(m, a, s).intersect(preimage(m, b, t)).measure(m.space());
    r.quantum_value = trace_inner(m.state().mat(), pa.mat() * pb.mat()).real();
    r.residual = std::abs(*r.model_value - *r.quantum_value);
    r.pass = r.residual <= m.tolerance().tol;
    if (!r.pass) {
        r.violations.push_back("mu = " + std::to_string(*r.model_value) + ", tr = " + std::to_string(*r.quantum_value));
    }
    return r;
}

/// For projectors A <= B: a ∩ b = a, with a = A^{-1}(1), b = B^{-1}(1).
inline CheckReport check_lemma1(const HVModel &m, const std::string &a, const std::string &b) {
    const Projector pa = detail::as_projector(m, a);
    const Projector pb = detail::as_projector(m, b);
    if (!leq(pa, pb, m.tolerance())) {
        throw LabError(ErrorKind::OrderViolation, "'" + a + "' is not below '" + b + "'");
    }
    CheckReport r{"order_lemma(" + a + " <= " + b + ")", "order-lemma"};
    const Event ea = preimage(m, a, 1.0);
    const Event eb = preimage(m, b, 1.0);
    const auto ib = m.values().index_of(b);
    for (auto p : ea.points) {
        const double gap = std::abs(1.0 - m.values().value(p, ib));
        r.residual = std::max(r.residual, gap);
        if (!eb.contains(p)) {
            r.violations.push_back("point " + m.space().labels()[p] + " in a but not in b");
        }
    }
    r.pass = r.violations.empty() && ea.intersect(eb) == ea;
    return r;
}

/// μ(a ∩ b)/μ(b) against tr[DBAB]/tr[DB].
inline CheckReport check_conditional_rule(const HVModel &m, const std::string &a, const std::string &b) {
    const Projector pa = detail::as_projector(m, a);
    const Projector pb = detail::as_projector(m, b);
    const Event ea = preimage(m, a, 1.0);
    const Event eb = preimage(m, b, 1.0);
    const double mu_b = eb.measure(m.space());
    if (mu_b <= m.tolerance().tol) {
        throw LabError(ErrorKind::ConditioningOnNull, "mu(b) = " + std::to_string(mu_b));
    }
    CheckReport r{"conditional_rule(" + a + " | " + b + ")", "conditional-rule"};
    r.model_value = ea.intersect(eb).measure(m.space()) / mu_b;
    const double tr_b = m.state().expectation(pb.mat());
    r.quantum_value = tr_b > 0.0 ? m.state().expectation(pb.mat() * pa.mat() * pb.mat()) / tr_b : NAN;
    r.residual = std::abs(*r.model_value - *r.quantum_value);
    r.pass = r.residual <= m.tolerance().tol;
    if (!r.pass) {
        r.violations.push_back("phase space " + std::to_string(*r.model_value) + ", trace rule " +
                               std::to_string(*r.quantum_value));
    }
    return r;
}

struct LabeledMatrix {
    std::string label;
    CMat mat;
};

struct CommutingModelOptions {
    bool register_compounds = true;
    std::uint64_t seed = 0x6a6f696e74ULL;
    int attempts = 8;
};

namespace detail {

inline double snap_to_spectrum(double v, const Observable &o) {
    double best = v;
    double dist = INFINITY;
    for (double e : o.eigenvalues()) {
        if (std::abs(v - e) < dist) {
            dist = std::abs(v - e);
            best = e;
        }
    }
    return best;
}

}  // namespace detail

/// Joint-eigenbasis model of a pairwise commuting family: Ω is the joint
/// eigenbasis, μ(ω) = <ω|D|ω>, f(ω, A) the A-eigenvalue of ω. With
/// `register_compounds`, A+B and AB are registered for every pair as
/// "(A+B)" and "(A*B)".
inline HVModel build_commuting_model(const std::vector<LabeledMatrix> &family, const Density &state,
                                     const Tolerance &tol = {}, const CommutingModelOptions &opts = {}) {
    const auto dim = state.dim();
    for (std::size_t i = 0; i < family.size(); ++i) {
        require_same_dim(family[i].mat, state.mat());
        for (std::size_t j = i + 1; j < family.size(); ++j) {
            const double c = commutator_norm(family[i].mat, family[j].mat);
            if (c > tol.tol) {
                throw LabError(ErrorKind::NotCommutingFamily, "'" + family[i].label + "' and '" + family[j].label +
                                                                  "' have commutator norm " + std::to_string(c));
            }
        }
    }

    std::vector<LabeledMatrix> items = family;
    std::vector<Compound> compounds;
    if (opts.register_compounds) {
        for (std::size_t i = 0; i < family.size(); ++i) {
            for (std::size_t j = i + 1; j < family.size(); ++j) {
                const auto &a = family[i], &b = family[j];
                const CMat prod = a.mat * b.mat;
                items.push_back({"(" + a.label + "+" + b.label + ")", a.mat + b.mat});
                items.push_back({"(" + a.label + "*" + b.label + ")", 0.5 * (prod + prod.adjoint())});
                compounds.push_back({CompoundKind::Sum, a.label, b.label, items[items.size() - 2].label});
                compounds.push_back({CompoundKind::Product, a.label, b.label, items.back().label});
            }
        }
    }

    // Diagonalize a random combination; retry if it fails to split the family.
    CounterRng rng(opts.seed);
    CMat basis;
    for (int attempt = 0; attempt < opts.attempts && basis.size() == 0; ++attempt) {
        CMat combo = CMat::Zero(dim, dim);
        for (const auto &f : family) {
            combo += (1.0 + rng.uniform()) * f.mat;
        }
        Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (combo + combo.adjoint()));
        const CMat u = es.eigenvectors();
        bool ok = true;
        for (const auto &f : family) {
            CMat rotated = u.adjoint() * f.mat * u;
            rotated.diagonal().setZero();
            if (op_norm(rotated) > tol.tol) {
                ok = false;
                break;
            }
        }
        if (ok) {
            basis = u;
        }
    }
    if (basis.size() == 0) {
        throw LabError(ErrorKind::NotCommutingFamily, "no joint eigenbasis found");
    }

    std::vector<std::string> labels;
    std::vector<double> weights;
    for (Eigen::Index k = 0; k < dim; ++k) {
        const CVec v = basis.col(k);
        labels.push_back("w" + std::to_string(k));
        weights.push_back(std::max(0.0, (v.adjoint() * state.mat() * v)(0, 0).real()));
    }

    std::vector<RegisteredItem> registered;
    for (const auto &it : items) {
        registered.push_back({it.label, Observable::from_matrix(it.mat, tol)});
    }
    std::vector<std::vector<double>> table(static_cast<std::size_t>(dim), std::vector<double>(items.size()));
    for (Eigen::Index k = 0; k < dim; ++k) {
        const CVec v = basis.col(k);
        for (std::size_t i = 0; i < registered.size(); ++i) {
            const double raw = (v.adjoint() * registered[i].observable.mat() * v)(0, 0).real();
            table[k][i] = detail::snap_to_spectrum(raw, registered[i].observable);
        }
    }
    return HVModel(PhaseSpace::make(std::move(labels), std::move(weights)),
                   ValueMap(std::move(registered), std::move(table), std::move(compounds)), state, tol);
}

/// Runs every applicable checker: spectrum rule; marginal rule for each
/// eigenvalue and the full spectrum; joint rule per commuting pair and
/// eigenvalue pair; declared sum/product compounds; order lemma and
/// conditional rule on projector pairs.
inline std::vector<CheckReport> run_all_checks(const HVModel &m) {
    std::vector<CheckReport> out;
    out.push_back(check_spectrum_rule(m));
    const auto &items = m.values().items();
    const auto &t = m.tolerance();
    for (const auto &it : items) {
        out.push_back(check_marginal_rule(m, it.label, it.observable.full_spectrum()));
        for (double v : it.observable.eigenvalues()) {
            out.push_back(check_marginal_rule(m, it.label, EigenvalueSet{{v}}));
        }
    }
    for (std::size_t i = 0; i < items.size(); ++i) {
        for (std::size_t j = i + 1; j < items.size(); ++j) {
            if (commutator_norm(items[i].observable.mat(), items[j].observable.mat()) > t.tol) {
                continue;
            }
            for (double v : items[i].observable.eigenvalues()) {
                for (double w : items[j].observable.eigenvalues()) {
                    out.push_back(check_joint_rule(m, items[i].label, EigenvalueSet{{v}}, items[j].label,
                                                   EigenvalueSet{{w}}));
                }
            }
        }
    }
    for (const auto &c : m.values().compounds()) {
        out.push_back(c.kind == CompoundKind::Sum ? check_sum_rule(m, c.a, c.b, c.result)
                                                  : check_product_rule(m, c.a, c.b, c.result));
    }
    std::vector<std::size_t> projectors;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (detail::is_projector_spectrum(items[i].observable, t.cluster_gap)) {
            projectors.push_back(i);
        }
    }
    for (auto i : projectors) {
        for (auto j : projectors) {
            if (i == j) {
                continue;
            }
            const Projector pa = Projector::from_matrix(items[i].observable.mat(), t);
            const Projector pb = Projector::from_matrix(items[j].observable.mat(), t);
            if (leq(pa, pb, t)) {
                out.push_back(check_lemma1(m, items[i].label, items[j].label));
            }
            if (preimage(m, items[j].label, 1.0).measure(m.space()) > t.tol) {
                out.push_back(check_conditional_rule(m, items[i].label, items[j].label));
            }
        }
    }
    return out;
}

}  // namespace nogo_lab
