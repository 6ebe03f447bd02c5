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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nogo_lab/io.hpp"
#include "nogo_lab/nogo.hpp"
#include "nogo_lab/sampling.hpp"

namespace nogo_lab::cli {

using io::Json;

inline constexpr int kSchemaVersion = 1;

enum ExitCode : int { kOk = 0, kViolated = 1, kConfigError = 2 };

struct RunConfig {
    std::string command;
    std::string input;
    int dim = 4;
    int trials = 100;
    std::uint64_t seed = 1;
    Tolerance tol;
    std::string out;
    std::string format = "structured";
    std::string state;
    std::string angles;
};

namespace detail {

inline std::string verdict_of(bool pass) { return pass ? "pass" : "fail"; }

inline Json check_entry(std::string name, std::string anchor, double residual, std::string_view verdict) {
    return {{"name", std::move(name)}, {"anchor", std::move(anchor)}, {"residual", residual},
            {"verdict", std::string(verdict)}};
}

inline Json config_json(const RunConfig &c) {
    Json j = {{"dim", c.dim},          {"trials", c.trials},           {"seed", c.seed},
              {"tol", c.tol.tol},      {"clusterGap", c.tol.cluster_gap}};
    if (!c.input.empty()) {
        j["input"] = std::filesystem::path(c.input).filename().string();
    }
    if (!c.state.empty()) {
        j["state"] = c.state;
    }
    if (!c.angles.empty()) {
        j["angles"] = c.angles;
    }
    return j;
}

inline std::string rational_string(const Rational &r) { return r.str(); }

inline std::string fixed(double v, int digits = 6) {
    std::ostringstream ss;
    ss << std::setprecision(digits) << v;
    return ss.str();
}

inline std::array<double, 4> parse_angles(const std::string &text) {
    std::array<double, 4> out{};
    std::stringstream ss(text);
    std::string part;
    int k = 0;
    while (std::getline(ss, part, ',')) {
        if (k == 4) {
            throw LabError(ErrorKind::ConfigError, "--angles takes four comma-separated values");
        }
        try {
            std::size_t used = 0;
            out[k] = std::stod(part, &used);
            if (used != part.size() || !std::isfinite(out[k])) {
                throw std::invalid_argument(part);
            }
        } catch (const std::exception &) {
            throw LabError(ErrorKind::ConfigError, "--angles: '" + part + "' is not a number");
        }
        ++k;
    }
    if (k != 4) {
        throw LabError(ErrorKind::ConfigError, "--angles takes four comma-separated values");
    }
    return out;
}

inline Json report_skeleton(const RunConfig &c) {
    return {{"schemaVersion", kSchemaVersion}, {"command", c.command}, {"config", config_json(c)}, {"checks", Json::array()}};
}

}  // namespace detail

/// A finished command: structured report, human text, exit code.
struct CommandResult {
    Json report;
    std::string human;
    int exit_code = kOk;
};

// ---------------------------------------------------------------------------

inline CommandResult cmd_verify_theorem2(const RunConfig &c) {
    CommandResult res;
    res.report = detail::report_skeleton(c);
    Json &checks = res.report["checks"];
    int pass = 0, violated = 0, fail = 0, disagree = 0, weak_witness = 0;
    double worst_commutator = 0.0, worst_gap_ratio = INFINITY;
    std::ostringstream human;
    for (int i = 0; i < c.trials; ++i) {
        CounterRng rng = CounterRng::stream(c.seed, static_cast<std::uint64_t>(i));
        const bool commuting = i % 2 == 0;
        const auto pair = commuting ? random_commuting_pair(c.dim, rng) : random_noncommuting_pair(c.dim, rng);
        const TheoremReport chain = check_theorem2_chain(pair[0], pair[1], c.tol);
        const TheoremReport alt = check_alt_proof(pair[0], pair[1], c.tol);
        const std::string tag = "pair[" + std::to_string(i) + "] " + (commuting ? "commuting" : "noncommuting");

        const double chain_res = chain.verdict == Verdict::Pass ? chain.steps.back().residual : chain.steps.front().residual;
        const double alt_res = alt.verdict == Verdict::Pass ? alt.steps.back().residual : 0.0;
        checks.push_back(detail::check_entry(tag + " chain", "trace-symmetry chain", chain_res, to_string(chain.verdict)));
        checks.push_back(detail::check_entry(tag + " complement", "complement route", alt_res, to_string(alt.verdict)));

        // expected outcome per construction
        const Verdict expected = commuting ? Verdict::Pass : Verdict::HypothesisViolated;
        for (const auto *r : {&chain, &alt}) {
            if (r->verdict == Verdict::Fail) {
                ++fail;
            } else if (r->verdict != expected) {
                ++fail;
                checks.push_back(detail::check_entry(tag + " expected " + std::string(to_string(expected)),
                                                     "construction", 0.0, "fail"));
            } else {
                (r->verdict == Verdict::Pass ? pass : violated) += 1;
            }
        }
        if (chain.verdict != alt.verdict) {
            ++disagree;
            checks.push_back(detail::check_entry(tag + " routes agree", "route agreement", 1.0, "fail"));
        }
        if (commuting) {
            worst_commutator = std::max(worst_commutator, commutator_norm(pair[0].mat(), pair[1].mat()));
        } else {
            const SymmetryGap sg = trace_symmetry_gap(pair[0], pair[1], c.tol);
            const double ratio = sg.realized / sg.gap;
            worst_gap_ratio = std::min(worst_gap_ratio, ratio);
            if (ratio < 0.9) {
                ++weak_witness;
                checks.push_back(detail::check_entry(tag + " witness", "trace-symmetry witness", ratio, "fail"));
            }
        }
        if (chain.verdict == Verdict::Fail || alt.verdict == Verdict::Fail) {
            human << "FAIL " << tag << ": " << (chain.verdict == Verdict::Fail ? chain.theorem : alt.theorem) << "\n";
        }
    }
    const bool ok = fail == 0 && disagree == 0 && weak_witness == 0;
    res.report["summary"] = {{"pairs", c.trials},
                             {"pass", pass},
                             {"hypothesisViolated", violated},
                             {"fail", fail},
                             {"routeDisagreements", disagree},
                             {"weakWitnesses", weak_witness},
                             {"worstCommutingCommutator", worst_commutator},
                             {"worstWitnessRatio", std::isfinite(worst_gap_ratio) ? Json(worst_gap_ratio) : Json(nullptr)},
                             {"verdict", detail::verdict_of(ok)}};
    human << "verify-theorem2 dim=" << c.dim << " pairs=" << c.trials << " seed=" << c.seed << "\n"
          << "  pass " << pass << ", hypothesis-violated " << violated << ", fail " << fail << "\n"
          << "  route disagreements " << disagree << ", weak witnesses " << weak_witness << "\n"
          << "  worst commutator on commuting pairs " << detail::fixed(worst_commutator) << "\n"
          << (ok ? "PASS" : "FAIL") << "\n";
    res.human = human.str();
    res.exit_code = ok ? kOk : kViolated;
    return res;
}

inline CommandResult cmd_check_model(const RunConfig &c) {
    CommandResult res;
    res.report = detail::report_skeleton(c);
    const HVModel model = io::load_model(c.input, c.tol);
    const auto reports = run_all_checks(model);
    Json &checks = res.report["checks"];
    std::ostringstream human;
    std::set<std::string> flagged;
    int failed = 0;
    for (const auto &r : reports) {
        Json entry = detail::check_entry(r.check, r.anchor, r.residual, detail::verdict_of(r.pass));
        if (r.model_value) {
            entry["modelValue"] = *r.model_value;
        }
        if (r.quantum_value) {
            entry["quantumValue"] = *r.quantum_value;
        }
        if (!r.violations.empty()) {
            entry["violations"] = r.violations;
        }
        checks.push_back(std::move(entry));
        human << (r.pass ? "pass " : "FAIL ") << std::left << std::setw(14) << r.anchor << " " << r.check
              << "  residual " << detail::fixed(r.residual) << "\n";
        if (!r.pass) {
            ++failed;
            flagged.insert(r.anchor);
        }
    }
    res.report["summary"] = {{"checks", reports.size()},
                             {"failed", failed},
                             {"flaggedAxioms", std::vector<std::string>(flagged.begin(), flagged.end())},
                             {"totalWeight", model.space().total()},
                             {"verdict", detail::verdict_of(failed == 0)}};
    human << (failed == 0 ? "PASS" : "FAIL") << " (" << failed << " of " << reports.size() << " checks failed)\n";
    res.human = human.str();
    res.exit_code = failed == 0 ? kOk : kViolated;
    return res;
}

inline CommandResult cmd_feasibility(const RunConfig &c) {
    CommandResult res;
    res.report = detail::report_skeleton(c);
    io::ScenarioDocument doc = io::load_scenario(c.input);
    if (!c.angles.empty()) {
        doc.set_chsh_angles(detail::parse_angles(c.angles), c.tol);
    }
    if (!c.state.empty()) {
        if (std::filesystem::is_regular_file(c.state)) {
            doc.state = io::parse_state(io::load_json(c.state), "/", doc.dim);
        } else {
            doc.state = named_state(c.state, doc.dim).mat();
        }
    }
    const Scenario s = doc.build(c.tol);
    const FeasibilityResult fr = hv_feasibility(s);
    std::ostringstream human;
    human << "scenario " << s.name() << ": " << s.items().size() << " items, " << s.contexts().size()
          << " contexts, " << fr.assignments.size() << " admissible assignments\n";

    Json f = {{"status", std::string(to_string(fr.status))},
              {"admissibleAssignments", fr.assignments.size()},
              {"constraints", fr.constraints.size()},
              {"robustness", fr.robustness}};
    Json &checks = res.report["checks"];
    checks.push_back(detail::check_entry("value assignments exist", "context rules",
                                         static_cast<double>(fr.assignments.size()),
                                         fr.assignments.empty() ? "fail" : "pass"));
    if (fr.status == FeasibilityStatus::Feasible) {
        Json cert = Json::array();
        for (const auto &wa : fr.certificate) {
            Json values = Json::object();
            for (std::size_t i = 0; i < s.items().size(); ++i) {
                values[s.items()[i].label] = wa.table.values[i];
            }
            cert.push_back({{"weight", detail::rational_string(wa.weight)}, {"values", values}});
        }
        f["certificate"] = cert;
        // exact replay of the certificate against every constraint row
        const auto pushed = push_forward(fr);
        std::size_t mismatches = 0;
        Rational total = 0;
        for (std::size_t i = 0; i < pushed.size(); ++i) {
            mismatches += pushed[i] != fr.constraints[i].target;
        }
        for (const auto &wa : fr.certificate) {
            total += wa.weight;
            mismatches += wa.weight < 0;
        }
        mismatches += total != 1;
        checks.push_back(detail::check_entry("certificate reproduces every constraint exactly", "exact replay",
                                             static_cast<double>(mismatches), mismatches == 0 ? "pass" : "fail"));
        human << "feasible: certificate over " << fr.certificate.size() << " assignments\n";
        for (const auto &wa : fr.certificate) {
            human << "  " << std::setw(12) << detail::rational_string(wa.weight) << "  ";
            for (std::size_t i = 0; i < s.items().size(); ++i) {
                human << (i ? " " : "") << s.items()[i].label << "=" << wa.table.values[i];
            }
            human << "\n";
        }
    } else {
        human << to_string(fr.status) << "\n";
    }
    if (fr.violated) {
        f["violatedConstraint"] = {{"name", fr.violated->name},
                                   {"expression", fr.violated->expression},
                                   {"quantumSide", fr.violated->quantum_side},
                                   {"classicalBound", fr.violated->classical_bound}};
        checks.push_back(detail::check_entry(fr.violated->name + ": " + fr.violated->expression, "classical bound",
                                             fr.violated->quantum_side - fr.violated->classical_bound, "fail"));
        human << "violated: " << fr.violated->name << ": " << fr.violated->expression << "\n"
              << "  quantum side " << detail::fixed(fr.violated->quantum_side, 9) << ", classical bound "
              << detail::fixed(fr.violated->classical_bound) << "\n";
    }
    if (auto roles = chsh_roles(s); roles && s.state()) {
        const auto &it = s.items();
        const Correlators e = chsh_correlators(s.state()->mat(), it[roles->a].mat, it[roles->a_prime].mat,
                                               it[roles->b].mat, it[roles->b_prime].mat, c.tol);
        const auto forms = chsh_forms(e);
        f["chsh"] = {{"roles", {it[roles->a].label, it[roles->a_prime].label, it[roles->b].label, it[roles->b_prime].label}},
                     {"correlators", {e.ab, e.ab_p, e.a_pb, e.a_pb_p}},
                     {"S", forms[3]},
                     {"forms", forms},
                     {"bchMax", bch_max(e)},
                     {"classicalBound", detail::rational_string(classical_chsh_bound(s))}};
        human << "CHSH: S = " << detail::fixed(forms[3], 9) << ", max over sign placements = "
              << detail::fixed(bch_max(e), 9) << ", classical bound " << classical_chsh_bound(s) << "\n";
    }
    res.report["feasibility"] = f;
    const bool ok = fr.status == FeasibilityStatus::Feasible;
    res.report["summary"] = {{"status", std::string(to_string(fr.status))}, {"verdict", detail::verdict_of(ok)}};
    res.human = human.str();
    res.exit_code = ok ? kOk : kViolated;
    return res;
}

inline CommandResult cmd_exercise(const RunConfig &c) {
    if (c.dim < 3) {
        throw LabError(ErrorKind::DimensionTooSmall,
                       "conditional-density uniqueness needs dim H >= 3, got " + std::to_string(c.dim));
    }
    CommandResult res;
    res.report = detail::report_skeleton(c);
    Json &checks = res.report["checks"];
    int passed = 0, resolved = 0, attempted = 0;
    double worst_existence = 0.0, smallest = INFINITY;
    std::ostringstream human;
    for (int i = 0; i < c.trials; ++i) {
        CounterRng rng = CounterRng::stream(c.seed, static_cast<std::uint64_t>(i));
        const Density d = Density::from_matrix(random_density_matrix(c.dim, rng));
        const auto rank = rng.uniform_int(2, c.dim);
        const Projector b = Projector::from_matrix(random_projector_matrix(c.dim, rank, rng));
        ExerciseOptions opts;
        opts.trials = 8;
        opts.seed = rng.next_u64();
        const ExerciseReport er = check_exercise_uniqueness(d, b, opts, c.tol);
        checks.push_back(detail::check_entry("pair[" + std::to_string(i) + "] rank(B)=" + std::to_string(rank),
                                             "conditional-uniqueness", er.worst_existence, to_string(er.report.verdict)));
        passed += er.report.verdict == Verdict::Pass;
        resolved += er.uniqueness_resolved;
        attempted += er.uniqueness_trials;
        worst_existence = std::max(worst_existence, er.worst_existence);
        smallest = std::min(smallest, er.smallest_perturbation);
        if (er.report.verdict != Verdict::Pass) {
            human << "FAIL pair[" << i << "]: " << er.report.note << "\n";
        }
    }
    const bool ok = passed == c.trials;
    res.report["summary"] = {{"pairs", c.trials},
                             {"pass", passed},
                             {"worstExistenceResidual", worst_existence},
                             {"perturbationsResolved", resolved},
                             {"perturbationsTried", attempted},
                             {"smallestPerturbation", std::isfinite(smallest) ? Json(smallest) : Json(nullptr)},
                             {"verdict", detail::verdict_of(ok)}};
    human << "exercise dim=" << c.dim << " pairs=" << c.trials << " seed=" << c.seed << "\n"
          << "  pass " << passed << " of " << c.trials << ", worst existence residual "
          << detail::fixed(worst_existence) << "\n"
          << "  discriminator resolved " << resolved << " of " << attempted << " perturbations\n"
          << (ok ? "PASS" : "FAIL") << "\n";
    res.human = human.str();
    res.exit_code = ok ? kOk : kViolated;
    return res;
}

inline void validate(const RunConfig &c) {
    if (c.trials < 1) {
        throw LabError(ErrorKind::ConfigError, "--trials must be at least 1");
    }
    if (c.dim < 2 || c.dim > 32) {
        throw LabError(ErrorKind::ConfigError, "--dim must lie in [2, 32]");
    }
    if (!(c.tol.tol > 0.0) || !std::isfinite(c.tol.tol) || !(c.tol.cluster_gap > 0.0) ||
        !std::isfinite(c.tol.cluster_gap)) {
        throw LabError(ErrorKind::ConfigError, "tolerances must be positive and finite");
    }
    if (c.format != "human" && c.format != "structured") {
        throw LabError(ErrorKind::ConfigError, "--format must be human or structured");
    }
}

inline CommandResult dispatch(const RunConfig &c) {
    validate(c);
    if (c.command == "verify-theorem2") {
        return cmd_verify_theorem2(c);
    }
    if (c.command == "check-model") {
        return cmd_check_model(c);
    }
    if (c.command == "feasibility") {
        return cmd_feasibility(c);
    }
    if (c.command == "exercise") {
        return cmd_exercise(c);
    }
    throw LabError(ErrorKind::ConfigError, "unknown command '" + c.command + "'");
}

/// Parses arguments, runs one command and writes its report. Returns the
/// process exit code; never throws.
inline int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
    CLI::App app{"Numerical laboratory for hidden-variable no-go theorems", "nogo_lab"};
    app.require_subcommand(1);
    // One config per subcommand: default_val writes through immediately.
    std::array<RunConfig, 4> cfg;
    std::array<std::string, 4> seed_text;
    std::array<CLI::App *, 4> subs{};

    auto common = [&](std::size_t k, const char *name, const char *help, int dim, int trials) {
        RunConfig &rc = cfg[k];
        CLI::App *sub = subs[k] = app.add_subcommand(name, help);
        rc.command = name;
        sub->add_option("--dim", rc.dim, "Hilbert space dimension [2, 32]")->default_val(dim);
        sub->add_option("--trials", rc.trials, "number of random instances")->default_val(trials);
        sub->add_option("--seed", seed_text[k], "64-bit seed")->envname("NOGO_LAB_SEED");
        sub->add_option("--tol", rc.tol.tol, "numerical tolerance")->default_val(1e-9);
        sub->add_option("--cluster-gap", rc.tol.cluster_gap, "eigenvalue clustering gap")->default_val(1e-8);
        sub->add_option("--out", rc.out, "write the report to this file");
        sub->add_option("--format", rc.format, "human | structured")->default_val("structured");
        return sub;
    };
    common(0, "verify-theorem2", "forced commutativity on random projector pairs", 4, 100);
    common(1, "check-model", "run every h.v. axiom check on a model file", 4, 1)
        ->add_option("model", cfg[1].input, "model file")
        ->required();
    common(2, "feasibility", "decide h.v. model existence for a scenario file", 4, 1)
        ->add_option("scenario", cfg[2].input, "scenario file")
        ->required();
    subs[2]->add_option("--state", cfg[2].state, "state name or state file");
    subs[2]->add_option("--angles", cfg[2].angles, "A,A',B,B' in degrees");
    common(3, "exercise", "conditional-density existence and uniqueness", 3, 20);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success &e) {
        app.exit(e, out, err);
        return kOk;
    } catch (const CLI::ParseError &e) {
        err << "error: " << e.what() << "\n";
        return kConfigError;
    }
    std::size_t chosen = 0;
    for (std::size_t k = 0; k < subs.size(); ++k) {
        if (subs[k]->parsed()) {
            chosen = k;
        }
    }
    RunConfig &c = cfg[chosen];
    const std::string &seed = seed_text[chosen];
    if (!seed.empty()) {
        try {
            if (seed.find_first_not_of("0123456789") != std::string::npos) {
                throw std::invalid_argument(seed);
            }
            c.seed = std::stoull(seed, nullptr, 10);
        } catch (const std::exception &) {
            err << "error: seed '" << seed << "' is not a 64-bit unsigned integer\n";
            return kConfigError;
        }
    }

    CommandResult res;
    try {
        res = dispatch(c);
    } catch (const LabError &e) {
        err << "error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << "\n";
        return kConfigError;
    }

    const std::string text = c.format == "structured" ? res.report.dump(2) + "\n" : res.human;
    if (c.out.empty()) {
        out << text;
    } else {
        std::ofstream f(c.out, std::ios::binary);
        if (!f || !(f << text)) {
            err << "error: cannot write '" << c.out << "'\n";
            return kConfigError;
        }
    }
    return res.exit_code;
}

}  // namespace nogo_lab::cli
