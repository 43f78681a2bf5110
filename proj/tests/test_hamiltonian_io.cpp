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


#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "jointmeas/hamiltonian_io.hpp"

using namespace jointmeas;

namespace {

HamiltonianSpec parse_text(const std::string& text) {
    std::istringstream in(text);
    return parse_hamiltonian(in);
}

std::string data_file(const std::string& name) { return std::string(JM_DATA_DIR) + "/hamiltonians/" + name; }

}  // namespace

TEST(ParseHamiltonian, MinimalFile) {
    const auto h = parse_text(R"({"schema_version": 1, "n_modes": 1, "terms": [{"indices": [1, 2], "coeff": -1.0}]})");
    EXPECT_EQ(h.n.fermionic(), 1);
    ASSERT_EQ(h.terms.size(), 1u);
    EXPECT_EQ(h.terms.at({1, 2}), -1.0);
    EXPECT_EQ(h.constant, 0.0);
    EXPECT_TRUE(h.chemistry);
    EXPECT_FALSE(h.reference_energy.has_value());
}

TEST(ParseHamiltonian, OddOddPairIsNotChemistry) {
    const auto h = parse_text(R"({"schema_version": 1, "n_modes": 2, "terms": [{"indices": [1, 3], "coeff": 0.5}]})");
    EXPECT_FALSE(h.chemistry);
    EXPECT_EQ(h.terms.at({1, 3}), 0.5);
}

TEST(ParseHamiltonian, RejectsMalformations) {
    const std::string head = R"({"schema_version": 1, "n_modes": 2, "terms": )";
    const std::vector<std::string> bad{
        R"([{"indices": [1, 2], "coeff": 1}, {"indices": [1, 2], "coeff": 2}])",
        R"([{"indices": [1, 2, 3], "coeff": 1}])",
        R"([{"indices": [1, 5], "coeff": 1}])",
        R"([{"indices": [0, 2], "coeff": 1}])",
        R"([{"indices": [2, 1], "coeff": 1}])",
        R"([{"indices": [], "coeff": 1}])",
        R"([{"indices": [1, 2], "coeff": "x"}])",
        R"([{"indices": [1, 2]}])",
        R"({})",
    };
    for (const auto& t : bad) EXPECT_THROW(parse_text(head + t + "}"), HamiltonianFormatError) << t;
    EXPECT_THROW(parse_text(R"({"schema_version": 2, "n_modes": 1, "terms": []})"), HamiltonianFormatError);
    EXPECT_THROW(parse_text(R"({"n_modes": 1, "terms": []})"), HamiltonianFormatError);
    EXPECT_THROW(parse_text(R"({"schema_version": 1, "n_modes": 0, "terms": []})"), HamiltonianFormatError);
    EXPECT_THROW(parse_text(R"({"schema_version": 1, "n_modes": 1, "terms": [)"), HamiltonianFormatError);
    EXPECT_THROW(parse_hamiltonian_file(data_file("missing.json")), std::runtime_error);
}

TEST(ParseHamiltonian, ChemistryFlagMatchesIndexParities) {
    for (const auto& name : {"h2.json", "lih.json"}) {
        const auto h = parse_hamiltonian_file(data_file(name));
        bool expected = true;
        for (const auto& [a, c] : h.terms) {
            int odd = 0;
            for (int i : a) odd += i & 1;
            expected = expected && (a.size() == 2 || a.size() == 4) && 2 * odd == static_cast<int>(a.size());
        }
        EXPECT_EQ(h.chemistry, expected) << name;
        EXPECT_TRUE(h.chemistry) << name;
    }
}

TEST(SerializeHamiltonian, RoundTripIsExact) {
    const auto h = parse_hamiltonian_file(data_file("h2.json"));
    EXPECT_EQ(h.n.fermionic(), 8);
    ASSERT_TRUE(h.reference_energy.has_value());
    const auto back = parse_hamiltonian(serialize_hamiltonian(h));
    EXPECT_EQ(back, h);
    for (const auto& [a, c] : h.terms) EXPECT_EQ(std::bit_cast<std::uint64_t>(back.terms.at(a)), std::bit_cast<std::uint64_t>(c));
    EXPECT_EQ(serialize_hamiltonian(back).dump(), serialize_hamiltonian(h).dump());
    EXPECT_EQ(hamiltonian_name(h), "H2");
}

TEST(SerializeHamiltonian, AwkwardDoublesSurvive) {
    HamiltonianSpec h;
    h.n = ModeCount(2);
    h.constant = 0.1 + 0.2;
    h.terms[{1, 2}] = std::nextafter(1.0, 2.0);
    h.terms[{1, 2, 3, 4}] = 5e-324;
    h.terms[{2, 3}] = -1.0 / 3.0;
    h.chemistry = is_chemistry(h);
    EXPECT_EQ(parse_hamiltonian(serialize_hamiltonian(h)), h);
}

TEST(SerializeHamiltonian, ConstantOnly) {
    HamiltonianSpec h;
    h.n = ModeCount(3);
    h.constant = -7.25;
    h.chemistry = true;
    const auto doc = serialize_hamiltonian(h);
    EXPECT_TRUE(doc.at("terms").empty());
    EXPECT_EQ(parse_hamiltonian(doc), h);
}

TEST(SerializeHamiltonian, RefusesNonFinite) {
    HamiltonianSpec h;
    h.n = ModeCount(1);
    h.terms[{1, 2}] = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(serialize_hamiltonian(h), std::invalid_argument);
    h.terms[{1, 2}] = 1.0;
    h.constant = std::numeric_limits<double>::infinity();
    EXPECT_THROW(serialize_hamiltonian(h), std::invalid_argument);
}
