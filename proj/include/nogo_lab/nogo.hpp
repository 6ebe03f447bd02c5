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
#include <optional>
#include <string>
#include <vector>

#include "nogo_lab/hvmodel.hpp"
#include "nogo_lab/quantum.hpp"
#include "nogo_lab/random.hpp"
#include "nogo_lab/report.hpp"

namespace nogo_lab {

struct SymmetryGap {
    double gap = 0.0;         // ||BAB - ABA||
    CMat witness;             // density realizing |tr[D(BAB - ABA)]| = gap
    double realized = 0.0;    // |tr[witness (BAB - ABA)]|
};

/// max over densities of |tr[DBAB] - tr[DABA]|, with the maximizing density.
/// When the gap is below tol the witness is the maximally mixed state.
inline SymmetryGap trace_symmetry_gap(const Projector &a, const Projector &b, const Tolerance &t = {}) {
    require_same_dim(a.mat(), b.mat());
    const CMat &pa = a.mat();
    const CMat &pb = b.mat();
    CMat diff = pb * pa * pb - pa * pb * pa;
    diff = 0.5 * (diff + diff.adjoint());
    SymmetryGap out;
    out.gap = op_norm(diff);
    if (out.gap > t.tol) {
        const auto w = annihilation_witness(diff, t.tol);
        out.witness = w.density;
        out.realized = std::abs(w.value);
    } else {
        out.witness = CMat::Identity(a.dim(), a.dim()) / static_cast<double>(a.dim());
        out.realized = std::abs(trace_inner(out.witness, diff));
    }
    return out;
}

/// Forced commutativity via the trace identity: tr[DBAB] = tr[DABA] for all D
/// gives BAB = ABA, hence (AB - BA)^2 = 0, hence AB = BA since AB - BA is
/// skew-Hermitian.
///
/// Step thresholds follow the algebra: with δ = ||BAB - ABA|| ≤ tol,
/// (AB-BA)^2 = (ABA - BAB)B + (BAB - ABA)A so ||C^2|| ≤ 2δ, and for a normal
/// C, ||C|| = sqrt(||C^2||).
inline TheoremReport check_theorem2_chain(const Projector &a, const Projector &b, const Tolerance &t = {}) {
    require_same_dim(a.mat(), b.mat());
    TheoremReport r;
    r.theorem = "forced-commutativity";
    const CMat &pa = a.mat();
    const CMat &pb = b.mat();
    const double round = 64.0 * std::numeric_limits<double>::epsilon();

    const SymmetryGap sg = trace_symmetry_gap(a, b, t);
    r.add("tr[DBAB] = tr[DABA] for all densities D, i.e. BAB = ABA", sg.gap, t.tol, true);
    if (sg.gap > t.tol) {
        r.witness = sg.witness;
        r.note = "witness density separates tr[DBAB] and tr[DABA] by " + std::to_string(sg.realized);
        r.settle();
        return r;
    }
    const double delta = sg.gap;
    const CMat bab = pb * pa * pb;
    const CMat aba = pa * pb * pa;
    r.add("A^2 = A", op_norm(pa * pa - pa), t.tol);
    r.add("B^2 = B", op_norm(pb * pb - pb), t.tol);
    r.add("ABAB = BAB", op_norm(aba * pb - bab), delta + t.tol);
    r.add("BABA = ABA", op_norm(bab * pa - aba), delta + t.tol);
    const CMat c = pa * pb - pb * pa;
    const double c2 = op_norm(c * c);
    r.add("(AB - BA)^2 = 0", c2, 2.0 * delta + 4.0 * t.tol);
    r.add("AB - BA is skew-Hermitian", op_norm(c + c.adjoint()), t.tol);
    const double cn = op_norm(c);
    r.add("||AB - BA|| = sqrt(||(AB - BA)^2||)", std::abs(cn * cn - c2), round * (1.0 + cn));
    r.add("AB = BA", cn, std::sqrt(2.0 * delta + 4.0 * t.tol) + round);
    r.settle();
    return r;
}

/// The complement route: with Ã = I - A, B̃ = I - B,
///   A = ABA + AB̃A                       (always)
///     = BAB + B̃AB̃                       (if XYX = YXY on {A, B, Ã, B̃})
///   AB = BAB,  BA = BAB                  (multiply by B on either side)
inline TheoremReport check_alt_proof(const Projector &a, const Projector &b, const Tolerance &t = {}) {
    require_same_dim(a.mat(), b.mat());
    TheoremReport r;
    r.theorem = "forced-commutativity-complement-route";
    const CMat &pa = a.mat();
    const CMat &pb = b.mat();
    const CMat at = identity(a.dim()) - pa;
    const CMat bt = identity(b.dim()) - pb;

    r.add("A = ABA + AB~A", op_norm(pa - (pa * pb * pa + pa * bt * pa)), t.tol);

    struct Named {
        const char *name;
        const CMat *m;
    };
    const Named set[] = {{"A", &pa}, {"B", &pb}, {"I-A", &at}, {"I-B", &bt}};
    double worst = 0.0;
    std::string worst_pair;
    std::optional<SymmetryGap> worst_gap;
    for (int i = 0; i < 4; ++i) {
        for (int j = i + 1; j < 4; ++j) {
            const CMat &x = *set[i].m;
            const CMat &y = *set[j].m;
            const double res = op_norm(x * y * x - y * x * y);
            const std::string pair = std::string(set[i].name) + ", " + set[j].name;
            r.add("XYX = YXY for (" + pair + ")", res, t.tol, true);
            if (res > worst) {
                worst = res;
                worst_pair = pair;
            }
        }
    }
    if (worst > t.tol) {
        r.note = "pair (" + worst_pair + ") violates XYX = YXY by " + std::to_string(worst);
        r.witness = trace_symmetry_gap(a, b, t).witness;
        r.settle();
        return r;
    }
    const double split = op_norm(pa - (pb * pa * pb + bt * pa * bt));
    r.add("A = BAB + B~AB~", split, 2.0 * worst + 2.0 * t.tol);
    const CMat bab = pb * pa * pb;
    r.add("AB = BAB", op_norm(pa * pb - bab), split + t.tol);
    r.add("BA = BAB", op_norm(pb * pa - bab), split + t.tol);
    r.add("AB = BA", op_norm(pa * pb - pb * pa), 2.0 * split + 2.0 * t.tol);
    r.settle();
    return r;
}

struct DiscriminatorResult {
    CMat ray;           // rank-one projector R1 <= B
    double gap = 0.0;   // |tr[D' R1] - tr[D_B R1]|
    bool inside = false;  // R1 <= B
};

/// Rank-one projector separating two operators supported on range(B), from
/// an eigenvector of their difference with maximal |eigenvalue|.
inline DiscriminatorResult uniqueness_discriminator(const CMat &candidate, const CMat &conditional,
                                                    const Projector &b, const Tolerance &t = {}) {
    require_same_dim(candidate, conditional);
    CMat diff = candidate - conditional;
    diff = 0.5 * (diff + diff.adjoint());
    DiscriminatorResult out;
    if (op_norm(diff) <= t.tol) {
        out.ray = CMat::Zero(b.dim(), b.dim());
        return out;
    }
    const auto w = annihilation_witness(diff, t.tol);
    out.ray = w.density;
    out.gap = std::abs(trace_inner(candidate, out.ray) - trace_inner(conditional, out.ray));
    out.inside = leq(Projector::from_matrix(out.ray, t), b, Tolerance{std::max(t.tol, 1e-8), t.cluster_gap});
    return out;
}

struct ExerciseOptions {
    int trials = 16;
    std::uint64_t seed = 1;
    /// Perturbations with ||D' - D_B|| below this are not expected to be resolved.
    double resolve_floor = 1e-8;
};

struct ExerciseReport {
    TheoremReport report;
    int existence_trials = 0;
    int uniqueness_trials = 0;
    int uniqueness_resolved = 0;
    double worst_existence = 0.0;
    double smallest_perturbation = INFINITY;
};

/// Conditional-density uniqueness: D_B = BDB/tr[DB] reproduces
/// tr[DC]/tr[DB] on every C <= B, annihilates range(B⊥), and any other
/// density on range(B) is told apart from D_B by some rank-one R1 <= B.
inline ExerciseReport check_exercise_uniqueness(const Density &d, const Projector &b, const ExerciseOptions &opts = {},
                                                const Tolerance &t = {}) {
    require_same_dim(d.mat(), b.mat());
    if (d.dim() < 3) {
        throw LabError(ErrorKind::DimensionTooSmall, "dim H >= 3 is required, got " + std::to_string(d.dim()));
    }
    const Density db = luders_density(d, b, t);
    const double pb = d.expectation(b.mat());
    ExerciseReport out;
    TheoremReport &r = out.report;
    r.theorem = "conditional-uniqueness";
    const CMat range = b.range_basis();
    const auto rank = b.rank();

    // (i) existence on random C <= B
    for (int k = 0; k < opts.trials; ++k) {
        CounterRng rng = CounterRng::stream(opts.seed, 2 * static_cast<std::uint64_t>(k));
        const auto r_c = rng.uniform_int(1, rank);
        const CMat inner = random_projector_matrix(rank, r_c, rng);
        const Projector c = Projector::from_matrix(range * inner * range.adjoint(), Tolerance{1e-8, t.cluster_gap});
        const double lhs = db.expectation(c.mat());
        const double rhs = d.expectation(c.mat()) / pb;
        const double res = std::abs(lhs - rhs);
        out.worst_existence = std::max(out.worst_existence, res);
        ++out.existence_trials;
        if (!leq(c, b, Tolerance{1e-8, t.cluster_gap})) {
            r.add("sampled C lies below B", op_norm(c.mat() * b.mat() - c.mat()), t.tol);
        }
    }
    r.add("tr[D_B C] = tr[DC]/tr[DB] for sampled C <= B", out.worst_existence, t.tol);

    // (ii) support of D_B
    const Projector bperp = orthocomplement(b);
    r.add("tr[D_B B] = 1", std::abs(db.expectation(b.mat()) - 1.0), t.tol);
    r.add("tr[D_B B_perp] = 0", std::abs(db.expectation(bperp.mat())), t.tol);
    double leak = 0.0;
    if (bperp.rank() > 0) {
        const CMat perp_basis = bperp.range_basis();
        for (Eigen::Index k = 0; k < perp_basis.cols(); ++k) {
            leak = std::max(leak, (db.mat() * perp_basis.col(k)).norm());
        }
    }
    r.add("D_B psi = 0 on range(B_perp)", leak, t.tol);

    // (iii) uniqueness: other densities on range(B) are separated by a ray
    if (rank < 2) {
        r.note = "range(B) is one-dimensional; D_B is the only density supported there";
        r.settle();
        return out;
    }
    double worst_miss = 0.0;
    for (int k = 0; k < opts.trials; ++k) {
        CounterRng rng = CounterRng::stream(opts.seed, 2 * static_cast<std::uint64_t>(k) + 1);
        const CMat inner = random_density_matrix(rank, rng);
        const CMat other = range * inner * range.adjoint();
        // alternate full random densities with small convex perturbations of D_B
        double s = 1.0;
        if (k % 2 == 1) {
            s = std::pow(10.0, -6.0 * rng.uniform());
        }
        const CMat candidate = (1.0 - s) * db.mat() + s * other;
        const double dist = op_norm(candidate - db.mat());
        if (dist < opts.resolve_floor) {
            continue;
        }
        ++out.uniqueness_trials;
        out.smallest_perturbation = std::min(out.smallest_perturbation, dist);
        const auto disc = uniqueness_discriminator(candidate, db.mat(), b, t);
        // the discriminator must recover the full operator-norm gap
        const bool ok = disc.inside && disc.gap >= dist * (1.0 - 1e-6) && disc.gap > t.tol;
        if (ok) {
            ++out.uniqueness_resolved;
        } else {
            worst_miss = std::max(worst_miss, dist - disc.gap);
        }
    }
    r.add("every sampled D' != D_B on range(B) separated by a rank-one R1 <= B",
          static_cast<double>(out.uniqueness_trials - out.uniqueness_resolved), 0.0);
    if (worst_miss > 0.0) {
        r.note = "largest unresolved gap " + std::to_string(worst_miss);
    }
    r.settle();
    return out;
}

struct LabeledProjector {
    std::string label;
    Projector projector;
};

struct ObstructingPair {
    std::string a;
    std::string b;
    double commutator = 0.0;
    double gap = 0.0;
    CMat witness;
};

struct CommutativityReport {
    TheoremReport report;
    std::vector<ObstructingPair> obstructions;
    std::optional<HVModel> model;
};

/// Scans a projector family pairwise. A fully commuting family gets its
/// joint-eigenbasis model attached; every noncommuting pair is reported with
/// its trace-symmetry witness, since no h.v. model can cover it.
inline CommutativityReport hv_implies_commuting(const std::vector<LabeledProjector> &family, const Density &d,
                                                const Tolerance &t = {}) {
    if (d.dim() < 3) {
        throw LabError(ErrorKind::DimensionTooSmall, "dim H >= 3 is required, got " + std::to_string(d.dim()));
    }
    CommutativityReport out;
    out.report.theorem = "hv-model-forces-commutativity";
    for (std::size_t i = 0; i < family.size(); ++i) {
        for (std::size_t j = i + 1; j < family.size(); ++j) {
            const auto &a = family[i];
            const auto &b = family[j];
            const double c = commutator_norm(a.projector.mat(), b.projector.mat());
            out.report.add("[" + a.label + ", " + b.label + "] = 0", c, t.tol, true);
            if (c > t.tol) {
                const SymmetryGap sg = trace_symmetry_gap(a.projector, b.projector, t);
                out.obstructions.push_back({a.label, b.label, c, sg.gap, sg.witness});
                if (!out.report.witness) {
                    out.report.witness = sg.witness;
                }
            }
        }
    }
    out.report.settle();
    if (out.obstructions.empty()) {
        std::vector<LabeledMatrix> mats;
        for (const auto &p : family) {
            mats.push_back({p.label, p.projector.mat()});
        }
        out.model = build_commuting_model(mats, d, t);
        out.report.note = family.empty() ? "empty family: vacuous" : "h.v. model exists (joint eigenbasis)";
    } else {
        out.report.note = std::to_string(out.obstructions.size()) + " noncommuting pair(s) obstruct any h.v. model";
    }
    return out;
}

}  // namespace nogo_lab
