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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nogo_lab/opcore.hpp"

namespace nogo_lab {

/// Outcome of a single h.v. axiom check on a model.
struct CheckReport {
    std::string check;    // e.g. "marginal_rule(A, {1})"
    std::string anchor;   // rule name, e.g. "HV(c)"
    double residual = 0.0;
    bool pass = true;
    std::optional<double> model_value;    // phase-space side
    std::optional<double> quantum_value;  // trace side
    std::vector<std::string> violations;
};

enum class Verdict { Pass, HypothesisViolated, Fail };

inline std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "pass";
        case Verdict::HypothesisViolated: return "hypothesis-violated";
        case Verdict::Fail: return "fail";
    }
    return "fail";
}

struct TheoremStep {
    std::string description;
    double residual = 0.0;
    double threshold = 0.0;
    bool pass = true;
    bool hypothesis = false;  // a premise rather than a derived identity
};

/// Ordered evidence for one theorem instance. A failed hypothesis step gives
/// HypothesisViolated; a failed derived step gives Fail.
struct TheoremReport {
    std::string theorem;
    std::vector<TheoremStep> steps;
    Verdict verdict = Verdict::Pass;
    std::optional<CMat> witness;
    std::string note;

    TheoremStep &add(std::string description, double residual, double threshold, bool hypothesis = false) {
        steps.push_back(TheoremStep{std::move(description), residual, threshold, residual <= threshold, hypothesis});
        return steps.back();
    }

    /// Recompute the verdict from the step list.
    void settle() {
        bool premise_ok = true;
        bool derived_ok = true;
        for (const auto &s : steps) {
            if (!s.pass) {
                (s.hypothesis ? premise_ok : derived_ok) = false;
            }
        }
        verdict = !derived_ok ? Verdict::Fail : (!premise_ok ? Verdict::HypothesisViolated : Verdict::Pass);
    }
};

}  // namespace nogo_lab
