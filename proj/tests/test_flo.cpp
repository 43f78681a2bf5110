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


#include "jointmeas/flo.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace jointmeas;

TEST(OrthogonalMatrix, RejectsNonOrthogonal) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(2, 2);
    m(0, 1) = 0.1;
    EXPECT_THROW(OrthogonalMatrix{m}, std::invalid_argument);
    EXPECT_THROW(OrthogonalMatrix{Eigen::MatrixXd::Zero(2, 3)}, std::invalid_argument);
    EXPECT_NO_THROW(OrthogonalMatrix::identity(4));
}

TEST(ModePermutation, ValidatesAndComposes) {
    EXPECT_THROW(ModePermutation({1, 1, 2}), std::invalid_argument);
    ModePermutation p({2, 3, 1}), q({1, 3, 2});
    EXPECT_EQ((p * q)(2), p(3));
    EXPECT_EQ(p * p.inverse(), ModePermutation::identity(3));
    EXPECT_EQ(p.apply({1, 2}), (MajoranaIndexSet{2, 3}));
}

TEST(PermutationMatrix, MapsColumnIToRowPofI) {
    ModePermutation p({3, 1, 2, 4});
    const auto r = permutation_to_orthogonal(p);
    for (int i = 1; i <= 4; ++i)
        for (int j = 1; j <= 4; ++j) EXPECT_EQ(r.at(j, i), j == p(i) ? 1.0 : 0.0);
}

TEST(ComposeSetting, OrderIsReshuffleSuperposePair) {
    Rng rng(3);
    const auto sup = random_orthogonal(6, rng);
    ModePermutation resh({2, 1, 3, 4, 6, 5}), pair({1, 3, 2, 4, 5, 6});
    const auto r = compose_setting(resh, sup, pair);
    const Eigen::MatrixXd expect =
        permutation_to_orthogonal(resh).matrix() * sup.matrix() * permutation_to_orthogonal(pair).matrix();
    EXPECT_LT((r.matrix() - expect).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(SubmatrixDet, SmallCases) {
    const auto id = OrthogonalMatrix::identity(6);
    EXPECT_EQ(submatrix_det(id, {}, {}), 1.0);
    EXPECT_EQ(submatrix_det(id, {1, 2}, {1, 2}), 1.0);
    EXPECT_EQ(submatrix_det(id, {1, 3}, {1, 2}), 0.0);
    EXPECT_THROW(submatrix_det(id, {1, 2}, {1, 2, 3, 4}), std::invalid_argument);
}

TEST(SubmatrixDet, AgreesWithLuOnRandomMinors) {
    Rng rng(11);
    const auto r = random_orthogonal(8, rng);
    const MajoranaIndexSet rows{1, 3, 4, 8}, cols{2, 3, 5, 6};
    Eigen::MatrixXd sub(4, 4);
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) sub(a, b) = r.at(rows[a], cols[b]);
    EXPECT_NEAR(submatrix_det(r, rows, cols), sub.determinant(), 1e-12);
    EXPECT_NEAR(visibility(r, rows, cols), std::abs(sub.determinant()), 1e-12);
}

TEST(SubmatrixDet, FullOrthogonalIsPlusMinusOne) {
    Rng rng(5);
    for (int t = 0; t < 10; ++t) {
        const auto r = random_orthogonal(6, rng);
        EXPECT_NEAR(std::abs(submatrix_det(r, {1, 2, 3, 4, 5, 6}, {1, 2, 3, 4, 5, 6})), 1.0, 1e-12);
    }
}

TEST(FlatBlock, AlmostHadamardForThree) {
    const auto b = build_flat_block(3);
    EXPECT_EQ(b.construction, "almost-hadamard");
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) EXPECT_NEAR(b.entries(i, j), i == j ? -1.0 / 3.0 : 2.0 / 3.0, 1e-15);
    EXPECT_NEAR(b.min_abs_entry, 1.0 / 3.0, 1e-15);
}

TEST(FlatBlock, SylvesterForPowersOfTwo) {
    for (int l : {2, 4, 8}) {
        const auto b = build_flat_block(l);
        EXPECT_LT(OrthogonalMatrix::orthogonality_residual(b.entries), 1e-12);
        EXPECT_NEAR(b.entries.cwiseAbs().minCoeff(), 1.0 / std::sqrt(l), 1e-12);
    }
}

TEST(FlatBlock, FamiliesAndErrors) {
    EXPECT_THROW(build_flat_block(0), std::invalid_argument);
    EXPECT_THROW(build_flat_block(5, BlockFamily::kHadamard), std::invalid_argument);
    const auto five = build_flat_block(5);
    EXPECT_LT(OrthogonalMatrix::orthogonality_residual(five.entries), 1e-12);
    EXPECT_NEAR(five.min_abs_entry, 0.4, 1e-12);
    const auto aij = build_flat_block(4, BlockFamily::kAij);
    EXPECT_NEAR(aij.entries(0, 0), -0.5, 1e-15);
    EXPECT_NEAR(aij.entries(0, 1), 0.5, 1e-15);
    EXPECT_EQ(build_flat_block(1).entries(0, 0), 1.0);
}

TEST(FlatBlock, EveryEntryBoundedBelow) {
    for (int l = 1; l <= 12; ++l) {
        const auto b = build_flat_block(l);
        EXPECT_GE(b.min_abs_entry * std::sqrt(l), 0.5) << "L = " << l;
    }
}

TEST(BlockFamily, Parse) {
    EXPECT_EQ(parse_block_family("hadamard"), BlockFamily::kHadamard);
    EXPECT_EQ(parse_block_family("aij"), BlockFamily::kAij);
    EXPECT_EQ(parse_block_family("auto"), BlockFamily::kAuto);
    EXPECT_THROW(parse_block_family("bogus"), std::invalid_argument);
}

TEST(RandomOrthogonal, IsOrthogonalAndSeeded) {
    Rng a(7), b(7);
    const auto r1 = random_orthogonal(10, a), r2 = random_orthogonal(10, b);
    EXPECT_LT(OrthogonalMatrix::orthogonality_residual(r1.matrix()), 1e-12);
    EXPECT_EQ(r1.matrix(), r2.matrix());
}
