// Copyright 2026 The jointmeas Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// JSON ingestion and export of Majorana-decomposed Hamiltonians.
//
// {
//   "schema_version": 1,
//   "n_modes": N,
//   "constant": c,
//   "terms": [{"indices": [1, 2], "coeff": h}, ...],
//   "reference_energy": E,          (optional)
//   "metadata": {...}              (optional)
// }

#pragma once

#include <cmath>
#include <fstream>
#include <istream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "jointmeas/hamiltonian.hpp"
#include "jointmeas/majorana.hpp"

namespace jointmeas {

inline constexpr int kHamiltonianSchemaVersion = 1;

class HamiltonianFormatError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

namespace detail {

inline const nlohmann::json& require(const nlohmann::json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) throw HamiltonianFormatError(std::string("missing field '") + key + "'");
    return *it;
}

inline double finite_number(const nlohmann::json& v, const std::string& what) {
    if (!v.is_number()) throw HamiltonianFormatError(what + " must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw HamiltonianFormatError(what + " is not finite");
    return d;
}

}  // namespace detail

inline HamiltonianSpec parse_hamiltonian(const nlohmann::json& doc) {
    using detail::require;
    if (!doc.is_object()) throw HamiltonianFormatError("document must be a JSON object");
    const auto& version = require(doc, "schema_version");
    if (!version.is_number_integer() || version.get<int>() != kHamiltonianSchemaVersion) {
        throw HamiltonianFormatError("unsupported schema_version (expected 1)");
    }
    const auto& nm = require(doc, "n_modes");
    if (!nm.is_number_integer() || nm.get<long long>() < 1 || nm.get<long long>() > 32) {
        throw HamiltonianFormatError("n_modes must be an integer in [1, 32]");
    }
    HamiltonianSpec h;
    h.n = ModeCount(nm.get<int>());
    h.constant = doc.contains("constant") ? detail::finite_number(doc.at("constant"), "constant") : 0.0;

    const auto& terms = require(doc, "terms");
    if (!terms.is_array()) throw HamiltonianFormatError("terms must be an array");
    for (std::size_t k = 0; k < terms.size(); ++k) {
        const auto& t = terms[k];
        const std::string where = "term " + std::to_string(k);
        if (!t.is_object()) throw HamiltonianFormatError(where + " must be an object");
        const auto& idx = require(t, "indices");
        if (!idx.is_array()) throw HamiltonianFormatError(where + ": indices must be an array");
        std::vector<int> v;
        for (const auto& i : idx) {
            if (!i.is_number_integer()) throw HamiltonianFormatError(where + ": indices must be integers");
            const long long x = i.get<long long>();
            if (x < 1 || x > h.n.majorana()) {
                throw HamiltonianFormatError(where + ": index " + std::to_string(x) + " outside [1, 2N]");
            }
            if (!v.empty() && x <= v.back()) throw HamiltonianFormatError(where + ": indices must be strictly increasing");
            v.push_back(static_cast<int>(x));
        }
        if (v.size() % 2) throw HamiltonianFormatError(where + ": odd-sized index set");
        if (v.empty()) throw HamiltonianFormatError(where + ": identity terms belong in 'constant'");
        const double c = detail::finite_number(require(t, "coeff"), where + " coeff");
        auto set = MajoranaIndexSet::from_sorted(std::move(v));
        if (!h.terms.emplace(set, c).second) throw HamiltonianFormatError("duplicate term " + set.to_string());
    }
    if (auto it = doc.find("reference_energy"); it != doc.end() && !it->is_null()) {
        h.reference_energy = detail::finite_number(*it, "reference_energy");
    }
    if (auto it = doc.find("metadata"); it != doc.end() && !it->is_null()) {
        if (!it->is_object()) throw HamiltonianFormatError("metadata must be an object");
        h.metadata_json = it->dump();
    }
    h.chemistry = is_chemistry(h);
    return h;
}

inline HamiltonianSpec parse_hamiltonian(std::istream& in) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw HamiltonianFormatError(std::string("malformed JSON: ") + e.what());
    }
    return parse_hamiltonian(doc);
}

inline HamiltonianSpec parse_hamiltonian_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open Hamiltonian file '" + path + "'");
    return parse_hamiltonian(in);
}

/// Document for `h`; doubles are written in shortest round-trip form so parsing restores them bit for bit.
inline nlohmann::json serialize_hamiltonian(const HamiltonianSpec& h) {
    if (!std::isfinite(h.constant)) throw std::invalid_argument("serialize: constant is not finite");
    nlohmann::json doc;
    doc["schema_version"] = kHamiltonianSchemaVersion;
    doc["n_modes"] = h.n.fermionic();
    doc["constant"] = h.constant;
    doc["terms"] = nlohmann::json::array();
    for (const auto& [a, c] : h.terms) {
        if (!std::isfinite(c)) throw std::invalid_argument("serialize: coefficient of " + a.to_string() + " is not finite");
        if (!a.even() || a.empty()) throw std::invalid_argument("serialize: invalid term " + a.to_string());
        a.check_range(h.n);
        doc["terms"].push_back({{"indices", a.indices()}, {"coeff", c}});
    }
    if (h.reference_energy) {
        if (!std::isfinite(*h.reference_energy)) throw std::invalid_argument("serialize: reference energy is not finite");
        doc["reference_energy"] = *h.reference_energy;
    }
    if (h.metadata_json) doc["metadata"] = nlohmann::json::parse(*h.metadata_json);
    return doc;
}

/// Molecule name from metadata, or `fallback`.
inline std::string hamiltonian_name(const HamiltonianSpec& h, const std::string& fallback = "hamiltonian") {
    if (!h.metadata_json) return fallback;
    const auto m = nlohmann::json::parse(*h.metadata_json);
    if (auto it = m.find("molecule"); it != m.end() && it->is_string()) return it->get<std::string>();
    return fallback;
}

}  // namespace jointmeas
