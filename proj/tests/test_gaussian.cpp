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


#include "jointmeas/gaussian.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "jointmeas/dense.hpp"

using namespace jointmeas;

namespace {

struct PairedStates {
    GaussianState gaussian;
    StateVector dense;
};

/// The same state built twice: as a rotated covariance and as U_R applied to a Fock vector.
PairedStates random_pair(ModeCount n, Rng& rng) {
    std::vector<int> occ(n.fermionic());
    for (auto& o : occ) o = rng.coin() ? 1 : 0;
    const auto r = random_orthogonal(n.majorana(), rng);
    const FloCircuit u(n, r);
    return {apply_orthogonal(init_fock(occ), r), StateVector(n, u.apply(StateVector::fock(occ).amp))};
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

TEST(Pfaffian, TwoByTwo) {
    Eigen::MatrixXd m(2, 2);
    m << 0, 2.5, -2.5, 0;
    EXPECT_DOUBLE_EQ(pfaffian(m), 2.5);
}

TEST(Pfaffian, DirectSum) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(4, 4);
    m(0, 1) = 3.0;
    m(1, 0) = -3.0;
    m(2, 3) = -0.5;
    m(3, 2) = 0.5;
    EXPECT_DOUBLE_EQ(pfaffian(m), -1.5);
}

TEST(Pfaffian, FourByFourClosedForm) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(4, 4);
    const double a = 0.3, b = -1.2, c = 0.7, d = 2.0, e = 0.1, f = -0.4;
    m(0, 1) = a, m(0, 2) = b, m(0, 3) = c, m(1, 2) = d, m(1, 3) = e, m(2, 3) = f;
    m = m - Eigen::MatrixXd(m.transpose());
    EXPECT_NEAR(pfaffian(m), a * f - b * e + c * d, 1e-14);
}

TEST(Pfaffian, SquareIsDeterminant) {
    Rng rng(1);
    for (int dim : {2, 4, 6, 8, 10}) {
        Eigen::MatrixXd m(dim, dim);
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) m(i, j) = rng.normal();
        m = m - Eigen::MatrixXd(m.transpose());
        const double pf = pfaffian(m), det = m.determinant();
        EXPECT_NEAR(pf * pf, det, 1e-8 * std::max(1.0, std::abs(det)));
    }
}

TEST(Pfaffian, Errors) {
    EXPECT_THROW(pfaffian(Eigen::MatrixXd::Zero(3, 3)), std::invalid_argument);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2, 2);
    m(0, 1) = 1.0;
    EXPECT_THROW(pfaffian(m), std::invalid_argument);
    EXPECT_EQ(pfaffian(Eigen::MatrixXd::Zero(0, 0)), 1.0);
}

TEST(InitFock, PairExpectations) {
    const auto vac = init_fock({0, 0, 0});
    for (int i = 1; i <= 3; ++i) EXPECT_EQ(expectation(vac, {2 * i - 1, 2 * i}), -1.0);
    const auto full = init_fock({1, 1});
    EXPECT_EQ(expectation(full, {1, 2}), 1.0);
    EXPECT_EQ(expectation(full, {3, 4}), 1.0);
    EXPECT_EQ(expectation(vac, {1, 3}), 0.0);
    EXPECT_EQ(expectation(vac, {1, 2, 3, 4}), 1.0);
    EXPECT_EQ(expectation(init_fock({1, 0}), {1, 2, 3, 4}), -1.0);
    EXPECT_THROW(expectation(vac, {1, 2, 3}), std::invalid_argument);
}

TEST(InitFock, NonPairSetsVanish) {
    const auto st = init_fock({1, 0, 1});
    for (const auto& a : even_sets(6)) {
        bool pair_union = true;
        for (std::size_t k = 0; k < a.size(); k += 2) pair_union &= a[k] % 2 == 1 && a[k + 1] == a[k] + 1;
        if (!pair_union) {
            EXPECT_EQ(expectation(st, a), 0.0) << a;
        }
    }
}

TEST(ApplyOrthogonal, IdentityAndPermutation) {
    const auto st = init_fock({1, 0});
    EXPECT_EQ(apply_orthogonal(st, OrthogonalMatrix::identity(4)).cov(), st.cov());
    const ModePermutation p({3, 4, 1, 2});
    const auto moved = apply_orthogonal(st, permutation_to_orthogonal(p));
    EXPECT_EQ(expectation(moved, {1, 2}), -1.0);
    EXPECT_EQ(expectation(moved, {3, 4}), 1.0);
    EXPECT_THROW(apply_orthogonal(st, OrthogonalMatrix::identity(6)), std::invalid_argument);
}

TEST(ApplyOrthogonal, PreservesPhysicality) {
    Rng rng(4);
    for (int t = 0; t < 10; ++t) {
        const auto st = random_gaussian_state(ModeCount(5), rng);
        EXPECT_LT(antisymmetry_residual(st.cov()), 1e-12);
        EXPECT_LT(st.physicality_excess(), 1e-10);
        EXPECT_NEAR((st.cov() * st.cov()).trace(), -10.0, 1e-9);
    }
}

TEST(ConjugateMonomial, Examples) {
    Rng rng(8);
    const auto st = random_gaussian_state(ModeCount(2), rng);
    EXPECT_EQ(conjugate_monomial(st, {}).cov(), st.cov());
    EXPECT_LT((conjugate_monomial(st, {1, 2, 3, 4}).cov() - st.cov()).cwiseAbs().maxCoeff(), 1e-15);
    const auto one = init_fock({1});
    EXPECT_EQ(expectation(conjugate_monomial(one, {1}), {1, 2}), -1.0);
}

TEST(SamplePairOutcomes, DeterministicFockStates) {
    Rng rng(2);
    for (int t = 0; t < 20; ++t) {
        EXPECT_EQ(sample_pair_outcomes(init_fock({0, 0, 0}), rng).first, (PairOutcomes{-1, -1, -1}));
        EXPECT_EQ(sample_pair_outcomes(init_fock({1, 0}), rng).first, (PairOutcomes{1, -1}));
    }
}

TEST(SamplePairOutcomes, PostStateIsFock) {
    Rng rng(3);
    const auto st = random_gaussian_state(ModeCount(4), rng);
    const auto [q, post] = sample_pair_outcomes(st, rng);
    for (int i = 0; i < 4; ++i) EXPECT_EQ(expectation(post, {2 * i + 1, 2 * i + 2}), q[i]);
    EXPECT_LT((post.cov() - init_fock({q[0] > 0, q[1] > 0, q[2] > 0, q[3] > 0}).cov()).cwiseAbs().maxCoeff(),
              1e-12);
}

TEST(SamplePairOutcomes, MarginalsMatchPairExpectations) {
    Rng rng(10);
    const auto st = random_gaussian_state(ModeCount(4), rng);
    const int shots = 200000;
    std::vector<double> sum(4, 0.0);
    for (int s = 0; s < shots; ++s) {
        const auto q = sample_pair_outcomes(st, rng).first;
        for (int i = 0; i < 4; ++i) sum[i] += q[i];
    }
    for (int i = 0; i < 4; ++i) {
        const double mu = expectation(st, {2 * i + 1, 2 * i + 2});
        const double se = std::sqrt((1.0 - mu * mu) / shots);
        EXPECT_NEAR(sum[i] / shots, mu, 5.0 * se + 1e-12);
    }
}

TEST(SamplePairOutcomes, JointDistributionMatchesDenseOracle) {
    Rng rng(12);
    const ModeCount n(3);
    const auto [g, psi] = random_pair(n, rng);
    std::vector<double> exact(8, 0.0);
    for (Eigen::Index b = 0; b < 8; ++b) exact[occupation_mask(b, 3)] += std::norm(psi.amp[b]);
    const int shots = 1000000;
    std::vector<double> counts(8, 0.0);
    Eigen::MatrixXd work;
    for (int s = 0; s < shots; ++s) {
        work = g.cov();
        counts[detail::sample_pairs_in_place(work, rng)] += 1.0;
    }
    double tv = 0.0;
    for (int k = 0; k < 8; ++k) tv += 0.5 * std::abs(counts[k] / shots - exact[k]);
    EXPECT_LT(tv, 5e-3);
}

TEST(SignConventions, ExpectationsMatchDenseOracle) {
    Rng rng(21);
    for (int nf = 1; nf <= 4; ++nf) {
        const ModeCount n(nf);
        const auto sets = even_sets(n.majorana());
        for (int t = 0; t < 5; ++t) {
            const auto [g, psi] = random_pair(n, rng);
            for (const auto& a : sets) EXPECT_NEAR(expectation(g, a), expectation(psi, a), 1e-9) << a;
        }
    }
}

TEST(SignConventions, ConjugationMatchesDenseOracle) {
    Rng rng(22);
    const ModeCount n(3);
    const auto sets = even_sets(6);
    const auto [g, psi] = random_pair(n, rng);
    for (unsigned long long xm = 0; xm < 64; ++xm) {
        const auto x = MajoranaIndexSet::from_mask(xm);
        const auto gx = conjugate_monomial(g, x);
        const StateVector px(n, ordered_product(n, x).dagger().apply(psi.amp));
        for (const auto& a : sets) {
            EXPECT_NEAR(expectation(gx, a), expectation(px, a), 1e-9);
            const double law = (intersection_size(a, x) % 2 ? -1.0 : 1.0) * expectation(g, a);
            EXPECT_NEAR(expectation(gx, a), law, 1e-12);
        }
    }
}

TEST(SignConventions, AdjointEvolutionMatchesDenseOracle) {
    Rng rng(23);
    const ModeCount n(3);
    const auto [g, psi] = random_pair(n, rng);
    const auto r = random_orthogonal(6, rng);
    const auto gr = apply_orthogonal_adjoint(g, r);
    const StateVector pr(n, FloCircuit(n, r).apply_adjoint(psi.amp));
    for (const auto& a : even_sets(6)) EXPECT_NEAR(expectation(gr, a), expectation(pr, a), 1e-9);
}
