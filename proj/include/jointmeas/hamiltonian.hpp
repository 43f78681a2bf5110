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


#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "jointmeas/majorana.hpp"

namespace jointmeas {

/// H = constant + sum_A h_A gamma_A over even sets A.
struct HamiltonianSpec {
    ModeCount n;
    std::map<MajoranaIndexSet, double> terms;
    double constant = 0.0;
    std::optional<double> reference_energy;
    /// Free-form metadata object (molecule, basis, geometry, units) kept as compact JSON text.
    std::optional<std::string> metadata_json;
    /// Set on ingestion: every term lies in X_2 or X_4.
    bool chemistry = false;

    bool operator==(const HamiltonianSpec&) const = default;
};

/// True iff `a` has one odd and one even index (|a| = 2) or two of each (|a| = 4).
inline bool chemistry_structured(const MajoranaIndexSet& a) {
    if (a.size() != 2 && a.size() != 4) return false;
    std::size_t odd = 0;
    for (int i : a) odd += static_cast<std::size_t>(i % 2);
    return 2 * odd == a.size();
}

inline bool is_chemistry(const HamiltonianSpec& h) {
    for (const auto& [a, c] : h.terms)
        if (!chemistry_structured(a)) return false;
    return true;
}

/// Checks even sizes, index range and finite coefficients.
inline void validate(const HamiltonianSpec& h) {
    if (!std::isfinite(h.constant)) throw std::invalid_argument("Hamiltonian constant is not finite");
    for (const auto& [a, c] : h.terms) {
        if (!a.even()) throw std::invalid_argument("Hamiltonian term " + a.to_string() + " has odd size");
        if (a.empty()) throw std::invalid_argument("identity term must be carried in the constant");
        a.check_range(h.n);
        if (!std::isfinite(c)) throw std::invalid_argument("Hamiltonian term " + a.to_string() + " is not finite");
    }
}

}  // namespace jointmeas
