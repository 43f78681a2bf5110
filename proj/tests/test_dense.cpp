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


#include "jointmeas/dense.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

using namespace jointmeas;

namespace {

Eigen::MatrixXcd pauli(char c) {
    Eigen::MatrixXcd m(2, 2);
    switch (c) {
        case 'X': m << 0, 1, 1, 0; break;
        case 'Y': m << 0, cplx(0, -1), cplx(0, 1), 0; break;
        case 'Z': m << 1, 0, 0, -1; break;
        default: m = Eigen::MatrixXcd::Identity(2, 2);
    }
    return m;
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

std::vector<MajoranaIndexSet> even_sets(int n_majorana) {
    std::vector<MajoranaIndexSet> out;
    for (unsigned long long m = 0; m < (1ULL << n_majorana); ++m) {
        auto s = MajoranaIndexSet::from_mask(m);
        if (s.even()) out.push_back(s);
    }
    return out;
}

}  // namespace

TEST(JwGamma, KroneckerForms) {
    const ModeCount n(2);
    EXPECT_LT((jw_gamma(n, 1) - kron(pauli('X'), pauli('I'))).norm(), 1e-15);
    EXPECT_LT((jw_gamma(n, 2) - kron(pauli('Y'), pauli('I'))).norm(), 1e-15);
    EXPECT_LT((jw_gamma(n, 3) - kron(pauli('Z'), pauli('X'))).norm(), 1e-15);
    EXPECT_LT((jw_gamma(n, 4) - kron(pauli('Z'), pauli('Y'))).norm(), 1e-15);
    EXPECT_THROW(jw_gamma(ModeCount(9), 1), std::invalid_argument);
}

TEST(JwGamma, CliffordRelations) {
    for (int nf = 1; nf <= 4; ++nf) {
        const ModeCount n(nf);
        const auto id = Eigen::MatrixXcd::Identity(1 << nf, 1 << nf);
        for (int i = 1; i <= n.majorana(); ++i) {
            const auto gi = jw_gamma(n, i);
            EXPECT_LT((gi - gi.adjoint()).norm(), 1e-15);
            for (int j = 1; j <= n.majorana(); ++j) {
                const auto gj = jw_gamma(n, j);
                EXPECT_LT((gi * gj + gj * gi - (i == j ? 2.0 : 0.0) * id).norm(), 1e-15);
            }
        }
    }
}

TEST(DenseMonomial, Examples) {
    EXPECT_LT((dense_monomial(ModeCount(2), {}) - Eigen::MatrixXcd::Identity(4, 4)).norm(), 1e-15);
    Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(2, 2);
    d(0, 0) = -1.0;
    d(1, 1) = 1.0;
    EXPECT_LT((dense_monomial(ModeCount(1), {1, 2}) - d).norm(), 1e-15);
    const auto q = dense_monomial(ModeCount(2), {1, 2, 3, 4});
    EXPECT_LT((q - q.adjoint()).norm(), 1e-15);
    EXPECT_LT((q * q - Eigen::MatrixXcd::Identity(4, 4)).norm(), 1e-15);
    EXPECT_NEAR(std::abs(q.trace()), 0.0, 1e-15);
    EXPECT_THROW(dense_monomial(ModeCount(2), {1, 2, 3}), std::invalid_argument);
}

TEST(DenseMonomial, ProductsMatchAlgebra) {
    for (int nf = 1; nf <= 3; ++nf) {
        const ModeCount n(nf);
        const auto sets = even_sets(n.majorana());
        for (const auto& a : sets)
            for (const auto& b : sets) {
                const auto t = monomial_product(a, b);
                const Eigen::MatrixXcd lhs = dense_monomial(n, a) * dense_monomial(n, b);
                EXPECT_LT((lhs - phase_value(t.phase) * dense_monomial(n, t.set)).norm(), 1e-14) << a << " " << b;
            }
    }
}

TEST(DenseFlo, Identity) {
    const auto u = dense_flo(ModeCount(2), OrthogonalMatrix::identity(4));
    EXPECT_NEAR(std::abs(u(0, 0)), 1.0, 1e-15);
    EXPECT_LT((u - u(0, 0) * Eigen::MatrixXcd::Identity(4, 4)).norm(), 1e-14);
}

TEST(DenseFlo, Transposition) {
    const ModeCount n(1);
    const auto r = permutation_to_orthogonal(ModePermutation({2, 1}));
    const auto u = dense_flo(n, r);
    EXPECT_LT((u * jw_gamma(n, 1) * u.adjoint() - jw_gamma(n, 2)).norm(), 1e-14);
    EXPECT_LT((u * jw_gamma(n, 2) * u.adjoint() - jw_gamma(n, 1)).norm(), 1e-14);
}

TEST(DenseFlo, ConjugationResidual) {
    Rng rng(31);
    for (int nf = 1; nf <= 4; ++nf) {
        const ModeCount n(nf);
        for (int t = 0; t < 3; ++t) {
            const auto r = random_orthogonal(n.majorana(), rng);
            const auto u = dense_flo(n, r);
            EXPECT_LT((u * u.adjoint() - Eigen::MatrixXcd::Identity(u.rows(), u.cols())).norm(), 1e-10);
            for (int i = 1; i <= n.majorana(); ++i) {
                Eigen::MatrixXcd rhs = Eigen::MatrixXcd::Zero(u.rows(), u.cols());
                for (int j = 1; j <= n.majorana(); ++j) rhs += r.at(j, i) * jw_gamma(n, j);
                EXPECT_LT((u * jw_gamma(n, i) * u.adjoint() - rhs).norm(), 1e-8);
            }
        }
    }
    EXPECT_THROW(dense_flo(ModeCount(6), OrthogonalMatrix::identity(12)), std::invalid_argument);
}

TEST(DenseFlo, MatrixFreeAdjointInverts) {
    Rng rng(32);
    const ModeCount n(5);
    const FloCircuit c(n, random_orthogonal(10, rng));
    const auto psi = StateVector::random(n, rng);
    EXPECT_LT((c.apply(c.apply_adjoint(psi.amp)) - psi.amp).norm(), 1e-12);
}

TEST(GroundState, SinglePair) {
    HamiltonianSpec h;
    h.n = ModeCount(1);
    h.terms[{1, 2}] = 1.0;
    const auto gs = ground_state(h);
    EXPECT_NEAR(gs.energy, -1.0, 1e-12);
    EXPECT_NEAR(std::norm(gs.state.amp[0]), 1.0, 1e-12);
}

TEST(GroundState, ConstantOnly) {
    HamiltonianSpec h;
    h.n = ModeCount(2);
    h.constant = -3.25;
    EXPECT_NEAR(ground_state(h).energy, -3.25, 1e-12);
}

TEST(GroundState, LanczosMatchesDirectDiagonalization) {
    Rng rng(33);
    HamiltonianSpec h;
    h.n = ModeCount(9);
    for (int i = 1; i <= 18; ++i)
        for (int j = i + 1; j <= 18; ++j)
            if ((i + j) % 2 == 1 && rng.uniform() < 0.3) h.terms[{i, j}] = rng.normal();
    for (int o : {1, 3, 5, 7}) h.terms[{o, o + 3, 11, 14}] = 0.1 * rng.normal();
    const auto gs = ground_state(h);
    EXPECT_LT(gs.residual, 1e-8);
    const auto op = to_pauli_sum(h);
    Eigen::MatrixXcd m(512, 512);
    for (Eigen::Index k = 0; k < 512; ++k) m.col(k) = op.apply(Eigen::VectorXcd::Unit(512, k));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
    EXPECT_NEAR(gs.energy, es.eigenvalues()[0], 1e-9);
}

TEST(GroundState, MolecularReferenceEnergy) {
    std::ifstream in(std::string(JM_DATA_DIR) + "/hamiltonians/h2.json");
    ASSERT_TRUE(in.good());
    const auto doc = nlohmann::json::parse(in);
    HamiltonianSpec h;
    h.n = ModeCount(doc.at("n_modes").get<int>());
    h.constant = doc.at("constant").get<double>();
    for (const auto& t : doc.at("terms")) h.terms[MajoranaIndexSet(t.at("indices").get<std::vector<int>>())] = t.at("coeff").get<double>();
    EXPECT_NEAR(ground_state(h).energy, doc.at("reference_energy").get<double>(), 1e-6);
}

TEST(ExactProtocol, EigenstateGivesVisibility) {
    // Vacuum is the +1 eigenstate of -gamma_{12}; use A = {1,2} with eigenvalue -1.
    Rng rng(40);
    const ModeCount n(2);
    const auto r = random_orthogonal(4, rng);
    const auto psi = StateVector::fock({0, 0});
    const MajoranaIndexSet a{1, 2}, b{3, 4};
    const double eta = visibility(r, a, b);
    const auto d = exact_protocol_distribution(r, psi, a, b);
    EXPECT_NEAR(d.p_minus, 0.5 * (1.0 + eta), 1e-12);
    EXPECT_NEAR(d.p_plus + d.p_minus, 1.0, 1e-12);
}

TEST(ExactProtocol, MaximallyMixedIsUniform) {
    Rng rng(41);
    const auto r = random_orthogonal(6, rng);
    const auto d = exact_protocol_distribution(r, GaussianState::maximally_mixed(ModeCount(3)), {1, 4}, {3, 4});
    EXPECT_NEAR(d.p_plus, 0.5, 1e-14);
    EXPECT_NEAR(d.p_minus, 0.5, 1e-14);
}

TEST(ExactProtocol, ClosedFormOnRandomStates) {
    Rng rng(42);
    for (int nf : {2, 3}) {
        const ModeCount n(nf);
        for (int t = 0; t < 5; ++t) {
            const auto r = random_orthogonal(n.majorana(), rng);
            const auto psi = StateVector::random(n, rng);
            for (const auto& a : even_sets(n.majorana())) {
                if (a.empty()) continue;
                std::vector<int> bv;
                for (std::size_t k = 0; k < a.size(); k += 2) {
                    const int pair = 1 + static_cast<int>((k / 2 + t) % nf);
                    bv.push_back(2 * pair - 1);
                    bv.push_back(2 * pair);
                }
                if (a.size() / 2 > static_cast<std::size_t>(nf)) continue;
                const MajoranaIndexSet b(bv);
                if (b.size() != a.size()) continue;
                const auto d = exact_protocol_distribution(r, psi, a, b);
                const double mean = visibility(r, a, b) * expectation(psi, a);
                EXPECT_NEAR(d.p_plus, 0.5 * (1.0 + mean), 1e-10);
                EXPECT_NEAR(d.p_minus, 0.5 * (1.0 - mean), 1e-10);
            }
        }
    }
}

TEST(ExactProtocol, GaussianRouteAgreesWithStateVector) {
    Rng rng(43);
    const ModeCount n(2);
    const auto r0 = random_orthogonal(4, rng);
    const auto g = apply_orthogonal(init_fock({1, 0}), r0);
    const StateVector psi(n, FloCircuit(n, r0).apply(StateVector::fock({1, 0}).amp));
    const auto r = random_orthogonal(4, rng);
    for (const auto& a : even_sets(4)) {
        if (a.empty() || a.size() > 4) continue;
        const MajoranaIndexSet b = a.size() == 2 ? MajoranaIndexSet{1, 2} : MajoranaIndexSet{1, 2, 3, 4};
        const auto d1 = exact_protocol_distribution(r, g, a, b);
        const auto d2 = exact_protocol_distribution(r, psi, a, b);
        EXPECT_NEAR(d1.p_plus, d2.p_plus, 1e-12);
    }
}

TEST(ExactProtocol, SettingOverloadCoinFlipsInconsistentSets) {
    const auto f = build_pair_scheme(ModeCount(3));
    Rng rng(44);
    const auto psi = StateVector::random(ModeCount(3), rng);
    const auto d = exact_protocol_distribution(f[0], psi, MajoranaIndexSet{1, 2});
    EXPECT_EQ(d.p_plus, 0.5);
    const auto d2 = exact_protocol_distribution(f[0], psi, MajoranaIndexSet{1, 3});
    EXPECT_NEAR(d2.mean(), 0.5 * expectation(psi, {1, 3}), 1e-12);
}

TEST(ExactProtocol, CapEnforced) {
    const ModeCount n(5);
    EXPECT_THROW(exact_protocol_distribution(OrthogonalMatrix::identity(10), StateVector::basis(n, 0), {1, 2}, {1, 2}),
                 std::invalid_argument);
}

TEST(ExtendWithVacuum, AppendsEmptyModes) {
    const auto psi = StateVector::fock({1, 0});
    const auto ext = extend_with_vacuum(psi, ModeCount(3));
    EXPECT_EQ(ext.amp, StateVector::fock({1, 0, 0}).amp);
    EXPECT_EQ(expectation(ext, {5, 6}), -1.0);
}

TEST(StandardPairMask, Validates) {
    EXPECT_EQ(standard_pair_mask({1, 2, 5, 6}), 0b101u);
    EXPECT_THROW(standard_pair_mask({2, 3}), std::invalid_argument);
}
