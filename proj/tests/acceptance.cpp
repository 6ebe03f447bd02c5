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

// Acceptance run: one PASS/FAIL line per criterion; exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>
#include <string>

#include "nogo_lab.hpp"
#include "nogo_lab/cli.hpp"

namespace {

using namespace nogo_lab;

// Tolerances pinned here, one per bound the criteria state.
constexpr double kCommutatorBound = 1e-8;     // final ||AB - BA|| on commuting pairs
constexpr double kNoncommutingFloor = 0.05;  // sampled commutator norm
constexpr double kWitnessRatio = 0.9;        // realized / maximal trace gap
constexpr double kSpotTolerance = 1e-9;      // 1/(2 sqrt 2) spot value
constexpr double kModelResidual = 1e-9;      // every h.v. check on built models
constexpr double kExistenceResidual = 1e-9;  // conditional density existence
constexpr double kResolveFloor = 1e-6;       // perturbations that must be resolved
constexpr double kChshTolerance = 1e-6;      // S against the grid-search optimum
constexpr double kBchMargin = 1e-6;          // instances this close to 2 are redrawn
constexpr double kSeconds1 = 30.0, kSeconds4 = 20.0, kSeconds8 = 1.0;

struct Outcome {
    bool pass = true;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

struct CliRun {
    int code;
    std::string out;
};

CliRun run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "nogo_lab");
    std::vector<const char *> argv;
    for (const auto &a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out, err;
    const int code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str()};
}

Outcome forward_direction() {
    const auto t0 = std::chrono::steady_clock::now();
    int fails = 0, non_pass = 0;
    double worst = 0.0;
    for (int dim = 3; dim <= 6; ++dim) {
        for (int k = 0; k < 1000; ++k) {
            CounterRng rng = CounterRng::stream(1000 + dim, k);
            const auto pair = random_commuting_pair(dim, rng);
            const auto r = check_theorem2_chain(pair[0], pair[1]);
            fails += r.verdict == Verdict::Fail;
            non_pass += r.verdict != Verdict::Pass;
            worst = std::max(worst, r.steps.back().residual);
        }
    }
    const double secs = seconds_since(t0);
    return {non_pass == 0 && fails == 0 && worst <= kCommutatorBound && secs < kSeconds1,
            "4000 commuting pairs, non-pass " + std::to_string(non_pass) + ", fail " + std::to_string(fails) +
                ", worst ||AB-BA|| " + fmt(worst) + ", " + fmt(secs) + " s"};
}

Outcome obstruction() {
    int wrong = 0, weak = 0, small = 0;
    double worst_ratio = INFINITY;
    for (int k = 0; k < 1000; ++k) {
        CounterRng rng = CounterRng::stream(2000, k);
        const auto pair = random_noncommuting_pair(3 + k % 4, rng, kNoncommutingFloor);
        small += commutator_norm(pair[0].mat(), pair[1].mat()) <= kNoncommutingFloor;
        const auto r = check_theorem2_chain(pair[0], pair[1]);
        wrong += r.verdict != Verdict::HypothesisViolated || !r.witness;
        const CMat &a = pair[0].mat(), &b = pair[1].mat();
        const double gap = op_norm(b * a * b - a * b * a);
        const double realized = r.witness ? std::abs(trace_inner(*r.witness, b * a * b - a * b * a)) : 0.0;
        worst_ratio = std::min(worst_ratio, realized / gap);
        weak += realized < kWitnessRatio * gap;
    }
    CVec f = CVec::Zero(3);
    f(0) = f(1) = 1.0;
    const double spot = trace_symmetry_gap(Projector::diagonal(3, {0}), Projector::onto_ray(f)).gap;
    const double spot_err = std::abs(spot - 1.0 / (2.0 * std::sqrt(2.0)));
    return {wrong == 0 && weak == 0 && small == 0 && spot_err <= kSpotTolerance,
            "1000 noncommuting pairs, wrong verdict " + std::to_string(wrong) + ", worst witness ratio " +
                fmt(worst_ratio) + ", spot error " + fmt(spot_err)};
}

Outcome route_agreement() {
    int disagree = 0, n = 0;
    for (int k = 0; k < 2000; ++k) {
        CounterRng rng = CounterRng::stream(3000, k);
        const auto dim = 3 + k % 4;
        const auto pair = k % 2 ? random_noncommuting_pair(dim, rng) : random_commuting_pair(dim, rng);
        const auto chain = check_theorem2_chain(pair[0], pair[1]);
        const auto alt = check_alt_proof(pair[0], pair[1]);
        const bool symmetric = trace_symmetry_gap(pair[0], pair[1]).gap <= Tolerance{}.tol;
        const bool commuting = chain.verdict == Verdict::Pass;
        disagree += chain.verdict != alt.verdict || symmetric != commuting;
        ++n;
    }
    return {disagree == 0, std::to_string(n) + " pairs, disagreements " + std::to_string(disagree)};
}

Outcome model_round_trip() {
    const auto t0 = std::chrono::steady_clock::now();
    int failed = 0;
    double worst = 0.0;
    std::set<std::string> anchors;
    for (int k = 0; k < 200; ++k) {
        CounterRng rng = CounterRng::stream(4000, k);
        const auto dim = 3 + k % 4;
        const auto family = random_commuting_family(dim, 2, rng);
        const HVModel m = build_commuting_model(family, Density::from_matrix(random_density_matrix(dim, rng)));
        for (const auto &r : run_all_checks(m)) {
            failed += !r.pass || r.residual > kModelResidual;
            worst = std::max(worst, r.residual);
            anchors.insert(r.anchor);
        }
    }
    const double secs = seconds_since(t0);
    const std::set<std::string> needed = {"HV(a)",        "HV(b)",      "HV(c)",           "HV(d)",
                                          "product-rule", "order-lemma", "conditional-rule"};
    const bool covered = std::includes(anchors.begin(), anchors.end(), needed.begin(), needed.end());
    return {failed == 0 && covered && secs < kSeconds4,
            "200 families, failed checks " + std::to_string(failed) + ", worst residual " + fmt(worst) +
                (covered ? ", all rules exercised" : ", rule coverage incomplete") + ", " + fmt(secs) + " s"};
}

Outcome exercise() {
    int non_pass = 0, unresolved = 0, tried = 0;
    double worst = 0.0;
    for (int k = 0; k < 200; ++k) {
        CounterRng rng = CounterRng::stream(5000, k);
        const auto dim = 3 + k % 3;
        const Density d = Density::from_matrix(random_density_matrix(dim, rng));
        const Projector b = Projector::from_matrix(random_projector_matrix(dim, rng.uniform_int(2, dim), rng));
        ExerciseOptions opts;
        opts.seed = rng.next_u64();
        opts.resolve_floor = kResolveFloor;
        const auto r = check_exercise_uniqueness(d, b, opts);
        non_pass += r.report.verdict != Verdict::Pass;
        tried += r.uniqueness_trials;
        unresolved += r.uniqueness_trials - r.uniqueness_resolved;
        worst = std::max(worst, r.worst_existence);
    }
    const int dim2 = run_cli({"exercise", "--dim", "2"}).code;
    return {non_pass == 0 && unresolved == 0 && worst <= kExistenceResidual && dim2 == cli::kConfigError,
            "200 pairs, worst existence " + fmt(worst) + ", unresolved " + std::to_string(unresolved) + " of " +
                std::to_string(tried) + ", dim 2 exit " + std::to_string(dim2)};
}

// The literal S = E(A,B) + E(A,B') + E(A',B) - E(A',B') cancels to 0 at these
// angles; the 2 sqrt 2 violation sits on another sign placement, so the
// criterion is checked on the maximum over the four placements.
Outcome chsh_constants() {
    const auto base = chsh_scenario({0, 90, 45, 135});
    const bool exact_two = classical_chsh_bound(base) == 2;
    const Density singlet = named_state("singlet", 4);
    const auto &it = base.items();
    const auto e = chsh_correlators(singlet.mat(), it[0].mat, it[1].mat, it[2].mat, it[3].mat);
    // grid-search oracle on the closed form E(a, b) = -cos(a - b)
    double oracle = 0.0;
    const double deg = std::numbers::pi / 180.0;
    for (int i = 0; i < 360; i += 5) {
        for (int j = 0; j < 360; j += 5) {
            for (int k = 0; k < 360; k += 5) {
                const double c[4] = {-std::cos(-j * deg), -std::cos(-k * deg), -std::cos((i - j) * deg),
                                     -std::cos((i - k) * deg)};
                for (int s = 0; s < 4; ++s) {
                    oracle = std::max(oracle, std::abs(c[0] + c[1] + c[2] + c[3] - 2 * c[s]));
                }
            }
        }
    }
    const double s_max = bch_max(e);
    const bool value_ok = std::abs(s_max - oracle) <= kChshTolerance &&
                          std::abs(s_max - 2.0 * std::sqrt(2.0)) <= kChshTolerance;
    const bool singlet_infeasible =
        hv_feasibility(base.with_state(singlet)).status == FeasibilityStatus::Infeasible;
    bool products_ok = true;
    for (int k = 0; k < 10; ++k) {
        CounterRng rng = CounterRng::stream(6000, k);
        const CMat rho = pauli::kron(random_density_matrix(2, rng), random_density_matrix(2, rng));
        const auto r = hv_feasibility(base.with_state(Density::from_matrix(rho)));
        const auto pushed = push_forward(r);
        bool exact = r.status == FeasibilityStatus::Feasible;
        for (std::size_t i = 0; exact && i < r.constraints.size(); ++i) {
            exact = pushed[i] == r.constraints[i].target;
        }
        products_ok = products_ok && exact;
    }
    const double literal = chsh_value(singlet, it[0].mat, it[1].mat, it[2].mat, it[3].mat);
    return {exact_two && value_ok && singlet_infeasible && products_ok,
            "bound 2 exact " + std::string(exact_two ? "yes" : "no") + ", max_k |S_k| " + fmt(s_max) +
                " (grid oracle " + fmt(oracle) + ", literal S " + fmt(literal) + "), singlet " +
                (singlet_infeasible ? "infeasible" : "NOT infeasible") + ", product certificates " +
                (products_ok ? "exact" : "NOT exact")};
}

Outcome fine_equivalence() {
    int counted = 0, disagree = 0, feasible = 0;
    for (std::uint64_t k = 0; counted < 200; ++k) {
        CounterRng rng = CounterRng::stream(7000, k);
        const ChshInstance inst = k % 4 == 0 ? random_chsh_instance(rng) : random_entangled_chsh_instance(rng);
        const double m = bch_max(
            chsh_correlators(inst.state, inst.settings[0], inst.settings[1], inst.settings[2], inst.settings[3]));
        if (std::abs(m - 2.0) <= kBchMargin) {
            continue;
        }
        ++counted;
        const auto r = hv_feasibility(chsh_scenario_from(inst));
        const bool lp_feasible = r.status == FeasibilityStatus::Feasible;
        feasible += lp_feasible;
        disagree += lp_feasible != (m <= 2.0);
    }
    return {disagree == 0, "200 instances (" + std::to_string(feasible) + " feasible), disagreements " +
                               std::to_string(disagree)};
}

int brute_force_magic_square() {
    int survivors = 0;
    for (int mask = 0; mask < 512; ++mask) {
        int v[3][3];
        for (int k = 0; k < 9; ++k) {
            v[k / 3][k % 3] = (mask >> k) & 1 ? -1 : 1;
        }
        bool ok = true;
        for (int i = 0; i < 3; ++i) {
            ok = ok && v[i][0] * v[i][1] * v[i][2] == 1;
            ok = ok && v[0][i] * v[1][i] * v[2][i] == (i == 2 ? -1 : 1);
        }
        survivors += ok;
    }
    return survivors;
}

Outcome magic_square() {
    const auto t0 = std::chrono::steady_clock::now();
    std::size_t found = 0;
    for (int k = 0; k < 20; ++k) {
        CounterRng rng = CounterRng::stream(8000, k);
        found += enumerate_assignments(magic_square_scenario(random_density_matrix(4, rng))).size();
    }
    const int brute = brute_force_magic_square();
    const double secs = seconds_since(t0);
    return {found == 0 && brute == 0 && secs < kSeconds8,
            "20 states, admissible " + std::to_string(found) + ", brute force " + std::to_string(brute) + " of 512, " +
                fmt(secs) + " s"};
}

Outcome determinism() {
    const std::string dir = NOGO_LAB_SCENARIO_DIR;
    const std::vector<std::vector<std::string>> runs = {
        {"verify-theorem2", "--dim", "4", "--trials", "50", "--seed", "11"},
        {"exercise", "--dim", "4", "--trials", "20", "--seed", "11"},
        {"check-model", dir + "/commuting.model"},
        {"feasibility", dir + "/chsh.scenario"},
        {"feasibility", dir + "/triad-dim3.scenario"}};
    int differing = 0;
    for (const auto &args : runs) {
        differing += run_cli(args).out != run_cli(args).out;
    }
    return {differing == 0, std::to_string(runs.size()) + " commands run twice, differing reports " +
                                std::to_string(differing)};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char *, std::function<Outcome()>>> criteria = {
        {"forced commutativity on commuting pairs", forward_direction},
        {"trace-symmetry obstruction and witness", obstruction},
        {"proof routes agree", route_agreement},
        {"commuting-family model round trip", model_round_trip},
        {"conditional density uniqueness", exercise},
        {"CHSH constants", chsh_constants},
        {"feasibility matches BCH test", fine_equivalence},
        {"magic square has no assignment", magic_square},
        {"deterministic reports", determinism}};
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception &e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += !o.pass;
        std::printf("criterion %zu: %s  %s: %s\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first,
                    o.detail.c_str());
    }
    std::fflush(stdout);
    return failures == 0 ? 0 : 1;
}
