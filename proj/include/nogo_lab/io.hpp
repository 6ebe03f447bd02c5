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

// JSON formats for scenarios, h.v. model fixtures and states.
//
// Complex entries are numbers or [re, im]; matrices are row-major nested
// arrays. An operator is an object holding exactly one of
//   "matrix":   [[...], ...]
//   "diagonal": [d0, d1, ...]
//   "ray":      [v0, v1, ...]            (projector onto the normalized ray)
//   "pauli":    "XIZ"                    (tensor product of Paulis)
//   "setting":  {"qubit": k, "qubits": n, "angle": deg}
//                                        (cos θ Z + sin θ X on qubit k of n)
// A state is a name (see named_state) or an operator object.

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "nogo_lab/hvmodel.hpp"
#include "nogo_lab/scenarios.hpp"

namespace nogo_lab::io {

using Json = nlohmann::json;

namespace detail {

[[noreturn]] inline void field_error(const std::string &path, const std::string &what) {
    throw LabError(ErrorKind::ParseError, "field '" + (path.empty() ? std::string("/") : path) + "': " + what);
}

inline const Json &require(const Json &j, const std::string &path, const char *key) {
    if (!j.is_object()) {
        field_error(path, "expected an object");
    }
    auto it = j.find(key);
    if (it == j.end()) {
        field_error(path + "/" + key, "missing");
    }
    return *it;
}

inline double number(const Json &j, const std::string &path) {
    if (!j.is_number()) {
        field_error(path, "expected a number");
    }
    const double v = j.get<double>();
    if (!std::isfinite(v)) {
        field_error(path, "not finite");
    }
    return v;
}

inline std::int64_t integer(const Json &j, const std::string &path) {
    if (!j.is_number_integer()) {
        field_error(path, "expected an integer");
    }
    return j.get<std::int64_t>();
}

inline std::string string(const Json &j, const std::string &path) {
    if (!j.is_string()) {
        field_error(path, "expected a string");
    }
    return j.get<std::string>();
}

inline const Json &array(const Json &j, const std::string &path) {
    if (!j.is_array()) {
        field_error(path, "expected an array");
    }
    return j;
}

inline Complex complex(const Json &j, const std::string &path) {
    if (j.is_number()) {
        return {number(j, path), 0.0};
    }
    if (j.is_array() && j.size() == 2) {
        return {number(j[0], path + "/0"), number(j[1], path + "/1")};
    }
    field_error(path, "expected a number or [re, im]");
}

inline CVec vector(const Json &j, const std::string &path) {
    array(j, path);
    CVec v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        v(static_cast<Eigen::Index>(i)) = complex(j[i], path + "/" + std::to_string(i));
    }
    return v;
}

inline CMat matrix(const Json &j, const std::string &path) {
    array(j, path);
    const auto n = static_cast<Eigen::Index>(j.size());
    CMat m(n, n);
    for (std::size_t r = 0; r < j.size(); ++r) {
        const std::string rp = path + "/" + std::to_string(r);
        if (array(j[r], rp).size() != j.size()) {
            field_error(rp, "row has " + std::to_string(j[r].size()) + " entries, expected " +
                                std::to_string(j.size()));
        }
        for (std::size_t c = 0; c < j.size(); ++c) {
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                complex(j[r][c], rp + "/" + std::to_string(c));
        }
    }
    return m;
}

}  // namespace detail

/// In-plane qubit setting; kept so CHSH angles can be overridden.
struct PlaneSetting {
    int qubit = 0;
    int qubits = 1;
    double angle_deg = 0.0;

    CMat matrix() const {
        CMat out = CMat::Identity(1, 1);
        for (int q = 0; q < qubits; ++q) {
            out = pauli::kron(out, q == qubit ? pauli::in_plane(angle_deg * std::numbers::pi / 180.0) : pauli::I());
        }
        return out;
    }
};

struct OperatorSpec {
    CMat mat;
    std::optional<PlaneSetting> setting;
};

inline OperatorSpec parse_operator(const Json &j, const std::string &path) {
    using namespace detail;
    if (!j.is_object()) {
        field_error(path, "expected an operator object");
    }
    const char *forms[] = {"matrix", "diagonal", "ray", "pauli", "setting"};
    int found = 0;
    for (const char *f : forms) {
        found += j.contains(f);
    }
    if (found != 1) {
        field_error(path, "give exactly one of matrix, diagonal, ray, pauli, setting");
    }
    if (j.contains("matrix")) {
        return {matrix(j["matrix"], path + "/matrix"), std::nullopt};
    }
    if (j.contains("diagonal")) {
        return {CMat(vector(j["diagonal"], path + "/diagonal").asDiagonal()), std::nullopt};
    }
    if (j.contains("ray")) {
        const CVec v = vector(j["ray"], path + "/ray");
        if (v.norm() == 0.0) {
            field_error(path + "/ray", "zero vector");
        }
        return {Projector::onto_ray(v).mat(), std::nullopt};
    }
    if (j.contains("pauli")) {
        try {
            return {pauli::word(string(j["pauli"], path + "/pauli")), std::nullopt};
        } catch (const LabError &e) {
            field_error(path + "/pauli", e.detail());
        }
    }
    const std::string sp = path + "/setting";
    const Json &s = j["setting"];
    PlaneSetting ps;
    ps.qubits = static_cast<int>(integer(require(s, sp, "qubits"), sp + "/qubits"));
    ps.qubit = static_cast<int>(integer(require(s, sp, "qubit"), sp + "/qubit"));
    ps.angle_deg = number(require(s, sp, "angle"), sp + "/angle");
    if (ps.qubits < 1 || ps.qubits > 5 || ps.qubit < 0 || ps.qubit >= ps.qubits) {
        field_error(sp, "need 0 <= qubit < qubits <= 5");
    }
    return {ps.matrix(), ps};
}

/// A named state or an operator object; validated as a density.
inline CMat parse_state(const Json &j, const std::string &path, Eigen::Index dim) {
    try {
        if (j.is_string()) {
            return named_state(j.get<std::string>(), dim).mat();
        }
        const CMat m = parse_operator(j, path).mat;
        if (m.rows() != dim) {
            throw LabError(ErrorKind::DimensionMismatch,
                           "state has dim " + std::to_string(m.rows()) + ", expected " + std::to_string(dim));
        }
        return Density::from_matrix(m).mat();
    } catch (const LabError &e) {
        if (e.kind() == ErrorKind::ParseError) {
            throw;
        }
        detail::field_error(path, e.what());
    }
}

/// Parses text, mapping syntax errors to line/column diagnostics.
inline Json parse_text(const std::string &text, const std::string &source) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error &e) {
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        std::string msg = e.what();
        if (auto pos = msg.find("syntax error"); pos != std::string::npos) {
            msg = msg.substr(pos);
        }
        throw LabError(ErrorKind::ParseError,
                       source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + msg);
    }
}

inline std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw LabError(ErrorKind::ConfigError, "cannot open '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline Json load_json(const std::string &path) { return parse_text(read_file(path), path); }

// ---------------------------------------------------------------------------
// Scenarios

struct ScenarioDocument {
    std::string name;
    Eigen::Index dim = 0;
    std::vector<ItemSpec> items;
    std::vector<std::optional<PlaneSetting>> settings;
    std::vector<std::vector<std::string>> contexts;
    std::vector<ProductConstraint> products;
    std::optional<CMat> state;

    Scenario build(const Tolerance &t = {}) const {
        return Scenario::make(name, dim, items, contexts, products, state, t);
    }

    /// Replaces the angles of a CHSH-shaped scenario whose items are all
    /// in-plane settings; angles are (A, A', B, B') by role.
    void set_chsh_angles(const std::array<double, 4> &deg, const Tolerance &t = {}) {
        const Scenario s = build(t);
        const auto roles = chsh_roles(s);
        if (!roles) {
            throw LabError(ErrorKind::WrongScenarioShape, "--angles needs a 2x2 dichotomic scenario");
        }
        const std::size_t order[4] = {roles->a, roles->a_prime, roles->b, roles->b_prime};
        for (int k = 0; k < 4; ++k) {
            const std::string &label = s.items()[order[k]].label;
            auto it = std::find_if(items.begin(), items.end(), [&](const ItemSpec &i) { return i.label == label; });
            auto &setting = settings[static_cast<std::size_t>(it - items.begin())];
            if (!setting) {
                throw LabError(ErrorKind::ConfigError, "item '" + label + "' is not given as a setting");
            }
            setting->angle_deg = deg[k];
            it->mat = setting->matrix();
        }
    }
};

inline ScenarioDocument parse_scenario(const Json &j) {
    using namespace detail;
    ScenarioDocument doc;
    doc.name = j.contains("name") ? string(j["name"], "/name") : "scenario";
    const auto dim = integer(require(j, "", "dim"), "/dim");
    if (dim < 1 || dim > 64) {
        field_error("/dim", "must lie in [1, 64]");
    }
    doc.dim = dim;
    const Json &items = array(require(j, "", "items"), "/items");
    for (std::size_t i = 0; i < items.size(); ++i) {
        const std::string p = "/items/" + std::to_string(i);
        const std::string label = string(require(items[i], p, "label"), p + "/label");
        const std::string kind = string(require(items[i], p, "kind"), p + "/kind");
        if (kind != "projector" && kind != "dichotomic") {
            field_error(p + "/kind", "expected \"projector\" or \"dichotomic\"");
        }
        OperatorSpec op = parse_operator(items[i], p);
        if (op.mat.rows() != doc.dim) {
            field_error(p, "operator has dim " + std::to_string(op.mat.rows()) + ", scenario " +
                               std::to_string(doc.dim));
        }
        doc.items.push_back({label, kind == "projector" ? ItemKind::Projector : ItemKind::Dichotomic,
                             std::move(op.mat)});
        doc.settings.push_back(op.setting);
    }
    if (j.contains("contexts")) {
        const Json &ctx = array(j["contexts"], "/contexts");
        for (std::size_t c = 0; c < ctx.size(); ++c) {
            const std::string p = "/contexts/" + std::to_string(c);
            std::vector<std::string> labels;
            for (std::size_t k = 0; k < array(ctx[c], p).size(); ++k) {
                labels.push_back(string(ctx[c][k], p + "/" + std::to_string(k)));
            }
            doc.contexts.push_back(std::move(labels));
        }
    }
    if (j.contains("products")) {
        const Json &pr = array(j["products"], "/products");
        for (std::size_t c = 0; c < pr.size(); ++c) {
            const std::string p = "/products/" + std::to_string(c);
            ProductConstraint pc;
            const Json &labels = array(require(pr[c], p, "labels"), p + "/labels");
            for (std::size_t k = 0; k < labels.size(); ++k) {
                pc.labels.push_back(string(labels[k], p + "/labels/" + std::to_string(k)));
            }
            pc.sign = static_cast<int>(integer(require(pr[c], p, "sign"), p + "/sign"));
            doc.products.push_back(std::move(pc));
        }
    }
    if (j.contains("state")) {
        doc.state = parse_state(j["state"], "/state", doc.dim);
    }
    return doc;
}

inline ScenarioDocument load_scenario(const std::string &path) {
    const Json j = load_json(path);
    try {
        return parse_scenario(j);
    } catch (const LabError &e) {
        throw LabError(e.kind(), path + ": " + e.detail());
    }
}

// ---------------------------------------------------------------------------
// h.v. model fixtures
//
//   {"dim": n, "state": ..., "observables": [{"label": .., <operator>}],
//    "points": [{"label": .., "weight": w, "values": {"A": v, ...}}],
//    "sums": [{"a": .., "b": .., "result": ..}], "products": [...]}

inline HVModel parse_model(const Json &j, const Tolerance &t = {}) {
    using namespace detail;
    const auto dim = integer(require(j, "", "dim"), "/dim");
    if (dim < 1 || dim > 64) {
        field_error("/dim", "must lie in [1, 64]");
    }
    const CMat state = parse_state(require(j, "", "state"), "/state", dim);

    std::vector<RegisteredItem> items;
    const Json &obs = array(require(j, "", "observables"), "/observables");
    for (std::size_t i = 0; i < obs.size(); ++i) {
        const std::string p = "/observables/" + std::to_string(i);
        const std::string label = string(require(obs[i], p, "label"), p + "/label");
        const CMat m = parse_operator(obs[i], p).mat;
        if (m.rows() != dim) {
            field_error(p, "operator has dim " + std::to_string(m.rows()) + ", model " + std::to_string(dim));
        }
        try {
            items.push_back({label, Observable::from_matrix(m, t)});
        } catch (const LabError &e) {
            field_error(p, e.what());
        }
    }

    std::vector<std::string> labels;
    std::vector<double> weights;
    std::vector<std::vector<double>> table;
    const Json &points = array(require(j, "", "points"), "/points");
    for (std::size_t k = 0; k < points.size(); ++k) {
        const std::string p = "/points/" + std::to_string(k);
        labels.push_back(string(require(points[k], p, "label"), p + "/label"));
        weights.push_back(number(require(points[k], p, "weight"), p + "/weight"));
        if (weights.back() < 0.0) {
            field_error(p + "/weight", "negative weight");
        }
        const Json &values = require(points[k], p, "values");
        if (!values.is_object()) {
            field_error(p + "/values", "expected an object keyed by observable label");
        }
        std::vector<double> row;
        for (const auto &it : items) {
            row.push_back(number(require(values, p + "/values", it.label.c_str()), p + "/values/" + it.label));
        }
        for (auto it = values.begin(); it != values.end(); ++it) {
            if (std::none_of(items.begin(), items.end(), [&](const auto &x) { return x.label == it.key(); })) {
                field_error(p + "/values/" + it.key(), "unknown observable");
            }
        }
        table.push_back(std::move(row));
    }

    std::vector<Compound> compounds;
    for (const char *key : {"sums", "products"}) {
        if (!j.contains(key)) {
            continue;
        }
        const Json &list = array(j[key], std::string("/") + key);
        for (std::size_t c = 0; c < list.size(); ++c) {
            const std::string p = std::string("/") + key + "/" + std::to_string(c);
            compounds.push_back({std::string(key) == "sums" ? CompoundKind::Sum : CompoundKind::Product,
                                 string(require(list[c], p, "a"), p + "/a"), string(require(list[c], p, "b"), p + "/b"),
                                 string(require(list[c], p, "result"), p + "/result")});
        }
    }
    try {
        return HVModel(PhaseSpace::make(std::move(labels), std::move(weights)),
                       ValueMap(std::move(items), std::move(table), std::move(compounds)), Density::from_matrix(state, t),
                       t);
    } catch (const LabError &e) {
        field_error("", e.what());
    }
}

inline HVModel load_model(const std::string &path, const Tolerance &t = {}) {
    const Json j = load_json(path);
    try {
        return parse_model(j, t);
    } catch (const LabError &e) {
        throw LabError(e.kind(), path + ": " + e.detail());
    }
}

/// Serializes a model in the fixture format (complex entries as [re, im]).
inline Json model_to_json(const HVModel &m) {
    auto mat = [](const CMat &x) {
        Json rows = Json::array();
        for (Eigen::Index r = 0; r < x.rows(); ++r) {
            Json row = Json::array();
            for (Eigen::Index c = 0; c < x.cols(); ++c) {
                row.push_back(x(r, c).imag() == 0.0 ? Json(x(r, c).real()) : Json::array({x(r, c).real(), x(r, c).imag()}));
            }
            rows.push_back(std::move(row));
        }
        return rows;
    };
    Json j;
    j["dim"] = m.state().dim();
    j["state"] = {{"matrix", mat(m.state().mat())}};
    const auto &items = m.values().items();
    for (const auto &it : items) {
        j["observables"].push_back({{"label", it.label}, {"matrix", mat(it.observable.mat())}});
    }
    for (std::size_t p = 0; p < m.space().size(); ++p) {
        Json values = Json::object();
        for (std::size_t i = 0; i < items.size(); ++i) {
            values[items[i].label] = m.values().value(p, i);
        }
        j["points"].push_back({{"label", m.space().labels()[p]}, {"weight", m.space().weights()[p]}, {"values", values}});
    }
    for (const auto &c : m.values().compounds()) {
        j[c.kind == CompoundKind::Sum ? "sums" : "products"].push_back({{"a", c.a}, {"b", c.b}, {"result", c.result}});
    }
    return j;
}

}  // namespace nogo_lab::io
