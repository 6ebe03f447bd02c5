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

#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "nogo_lab/feasibility.hpp"

namespace nogo_lab {

namespace pauli {

inline CMat I() { return CMat::Identity(2, 2); }
inline CMat X() {
    CMat m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}
inline CMat Y() {
    CMat m(2, 2);
    m << 0, Complex(0, -1), Complex(0, 1), 0;
    return m;
}
inline CMat Z() {
    CMat m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

inline CMat kron(const CMat &a, const CMat &b) {
    CMat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

/// Tensor product of single-qubit Paulis named by a string such as "XIY".
inline CMat word(const std::string &w) {
    CMat out = CMat::Identity(1, 1);
    for (char c : w) {
        switch (c) {
            case 'I': out = kron(out, I()); break;
            case 'X': out = kron(out, X()); break;
            case 'Y': out = kron(out, Y()); break;
            case 'Z': out = kron(out, Z()); break;
            default: throw LabError(ErrorKind::ConfigError, std::string("unknown Pauli letter '") + c + "'");
        }
    }
    return out;
}

/// cos θ Z + sin θ X, a ±1 observable in the x-z plane.
inline CMat in_plane(double theta) { return std::cos(theta) * Z() + std::sin(theta) * X(); }

}  // namespace pauli

/// singlet, phi-plus, ghz, product (|0...0>), maximally-mixed.
inline Density named_state(const std::string &name, Eigen::Index dim) {
    const double r = 1.0 / std::sqrt(2.0);
    auto ket = [&](std::initializer_list<std::pair<Eigen::Index, double>> amps, Eigen::Index need) {
        if (dim != need) {
            throw LabError(ErrorKind::DimensionMismatch,
                           "state '" + name + "' needs dim " + std::to_string(need) + ", scenario has " +
                               std::to_string(dim));
        }
        CVec v = CVec::Zero(dim);
        for (auto [i, a] : amps) {
            v(i) = a;
        }
        return Density::pure(v);
    };
    if (name == "singlet") {
        return ket({{1, r}, {2, -r}}, 4);
    }
    if (name == "phi-plus") {
        return ket({{0, r}, {3, r}}, 4);
    }
    if (name == "ghz") {
        return ket({{0, r}, {7, r}}, 8);
    }
    if (name == "product") {
        CVec v = CVec::Zero(dim);
        v(0) = 1;
        return Density::pure(v);
    }
    if (name == "maximally-mixed") {
        return Density::maximally_mixed(dim);
    }
    throw LabError(ErrorKind::ConfigError, "unknown state '" + name + "'");
}

/// Two-qubit CHSH scenario. Angles in degrees for A, A' (qubit 1) and B, B'
/// (qubit 2); each setting is cos θ Z + sin θ X.
inline Scenario chsh_scenario(const std::array<double, 4> &degrees, std::optional<CMat> state = std::nullopt) {
    std::array<CMat, 4> obs;
    for (int i = 0; i < 4; ++i) {
        const CMat local = pauli::in_plane(degrees[i] * std::numbers::pi / 180.0);
        obs[i] = i < 2 ? pauli::kron(local, pauli::I()) : pauli::kron(pauli::I(), local);
    }
    return Scenario::make("chsh", 4,
                          {{"A", ItemKind::Dichotomic, obs[0]},
                           {"A'", ItemKind::Dichotomic, obs[1]},
                           {"B", ItemKind::Dichotomic, obs[2]},
                           {"B'", ItemKind::Dichotomic, obs[3]}},
                          {{"A", "B"}, {"A", "B'"}, {"A'", "B"}, {"A'", "B'"}}, {}, std::move(state));
}

/// Mermin-Peres square; the third column multiplies to -I.
inline Scenario magic_square_scenario(std::optional<CMat> state = std::nullopt) {
    const std::string words[3][3] = {{"XI", "IX", "XX"}, {"IY", "YI", "YY"}, {"XY", "YX", "ZZ"}};
    std::vector<ItemSpec> items;
    std::vector<std::vector<std::string>> contexts;
    std::vector<ProductConstraint> products;
    auto label = [](int r, int c) { return "m" + std::to_string(r + 1) + std::to_string(c + 1); };
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) {
            items.push_back({label(r, c), ItemKind::Dichotomic, pauli::word(words[r][c])});
        }
    }
    for (int r = 0; r < 3; ++r) {
        contexts.push_back({label(r, 0), label(r, 1), label(r, 2)});
        products.push_back({contexts.back(), 1});
    }
    for (int c = 0; c < 3; ++c) {
        contexts.push_back({label(0, c), label(1, c), label(2, c)});
        products.push_back({contexts.back(), c == 2 ? -1 : 1});
    }
    return Scenario::make("magic-square", 4, std::move(items), std::move(contexts), std::move(products),
                          std::move(state));
}

/// Three-qubit Mermin star (GHZ argument): XXX XYY YXY YYX multiply to -I.
inline Scenario mermin_star_scenario(std::optional<CMat> state = std::nullopt) {
    std::vector<ItemSpec> items;
    for (const char *w : {"XII", "IXI", "IIX", "YII", "IYI", "IIY", "XXX", "XYY", "YXY", "YYX"}) {
        items.push_back({w, ItemKind::Dichotomic, pauli::word(w)});
    }
    std::vector<std::vector<std::string>> contexts = {{"XII", "IXI", "IIX", "XXX"},
                                                      {"XII", "IYI", "IIY", "XYY"},
                                                      {"YII", "IXI", "IIY", "YXY"},
                                                      {"YII", "IYI", "IIX", "YYX"},
                                                      {"XXX", "XYY", "YXY", "YYX"}};
    std::vector<ProductConstraint> products;
    for (std::size_t i = 0; i < contexts.size(); ++i) {
        products.push_back({contexts[i], i == 4 ? -1 : 1});
    }
    return Scenario::make("ghz", 8, std::move(items), std::move(contexts), std::move(products), std::move(state));
}

/// Two orthonormal bases of C^3 sharing e1.
inline Scenario triad_scenario(std::optional<CMat> state = std::nullopt) {
    const double r = 1.0 / std::sqrt(2.0);
    auto ray = [](double x, double y, double z) {
        CVec v(3);
        v << x, y, z;
        return Projector::onto_ray(v).mat();
    };
    return Scenario::make("triad-dim3", 3,
                          {{"e1", ItemKind::Projector, ray(1, 0, 0)},
                           {"e2", ItemKind::Projector, ray(0, 1, 0)},
                           {"e3", ItemKind::Projector, ray(0, 0, 1)},
                           {"f2", ItemKind::Projector, ray(0, r, r)},
                           {"f3", ItemKind::Projector, ray(0, r, -r)}},
                          {{"e1", "e2", "e3"}, {"e1", "f2", "f3"}}, {}, std::move(state));
}

}  // namespace nogo_lab
