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


#include "jointmeas/majorana.hpp"

#include <gtest/gtest.h>

#include <set>
#include <unordered_set>

using namespace jointmeas;

TEST(ModeCount, Counts) {
    ModeCount n(3);
    EXPECT_EQ(n.fermionic(), 3);
    EXPECT_EQ(n.majorana(), 6);
    EXPECT_EQ(ModeCount::from_majorana(8).fermionic(), 4);
    EXPECT_THROW(ModeCount(0), std::invalid_argument);
    EXPECT_THROW(ModeCount::from_majorana(5), std::invalid_argument);
}

TEST(MajoranaIndexSet, SortsAndValidates) {
    MajoranaIndexSet s{4, 1, 3};
    EXPECT_EQ(s.indices(), (std::vector<int>{1, 3, 4}));
    EXPECT_FALSE(s.even());
    EXPECT_THROW((MajoranaIndexSet{1, 1}), std::invalid_argument);
    EXPECT_THROW((MajoranaIndexSet{0, 2}), std::out_of_range);
    EXPECT_THROW((MajoranaIndexSet{1, 7}).check_range(ModeCount(3)), std::out_of_range);
    EXPECT_NO_THROW((MajoranaIndexSet{1, 6}).check_range(ModeCount(3)));
}

TEST(MajoranaIndexSet, MaskRoundTrip) {
    for (unsigned long long m = 0; m < 256; ++m) EXPECT_EQ(MajoranaIndexSet::from_mask(m).mask(), m);
    EXPECT_EQ((MajoranaIndexSet{1, 3}).mask(), 0b101ULL);
}

TEST(MajoranaIndexSet, OrdersBySizeThenLexicographically) {
    std::set<MajoranaIndexSet> s{{1, 2, 3, 4}, {2, 3}, {1, 4}, {}};
    std::vector<MajoranaIndexSet> v(s.begin(), s.end());
    EXPECT_EQ(v[0], MajoranaIndexSet{});
    EXPECT_EQ(v[1], (MajoranaIndexSet{1, 4}));
    EXPECT_EQ(v[2], (MajoranaIndexSet{2, 3}));
    EXPECT_EQ(v[3], (MajoranaIndexSet{1, 2, 3, 4}));
}

TEST(Commutes, Examples) {
    EXPECT_TRUE(commutes({1, 2}, {3, 4}));
    EXPECT_FALSE(commutes({1, 2}, {2, 3}));
    EXPECT_TRUE(commutes({1, 2}, {1, 2}));
    EXPECT_TRUE(commutes({}, {1, 5}));
    EXPECT_FALSE(commutes({1, 2, 3, 4}, {1, 5}));
    EXPECT_THROW(commutes({1, 2}, {3, 9}, ModeCount(4)), std::out_of_range);
}

TEST(Commutes, IsSymmetric) {
    for (unsigned long long a = 0; a < 64; ++a)
        for (unsigned long long b = 0; b < 64; ++b) {
            auto sa = MajoranaIndexSet::from_mask(a), sb = MajoranaIndexSet::from_mask(b);
            EXPECT_EQ(commutes(sa, sb), commutes(sb, sa));
        }
}

TEST(SetOps, IntersectionAndSymmetricDifference) {
    EXPECT_EQ(intersection_size({1, 2, 5}, {2, 5, 6}), 2u);
    EXPECT_EQ(symmetric_difference({1, 2, 5}, {2, 5, 6}), (MajoranaIndexSet{1, 6}));
    EXPECT_EQ(symmetric_difference({1, 2}, {1, 2}), MajoranaIndexSet{});
}

TEST(MonomialProduct, OverlappingPairs) {
    // (i g1 g2)(i g2 g3) = -g1 g3 = i (i g1 g3)
    const auto t = monomial_product({1, 2}, {2, 3});
    EXPECT_EQ(t.set, (MajoranaIndexSet{1, 3}));
    EXPECT_EQ(t.phase, Phase::i());
}

TEST(MonomialProduct, DisjointPairsCommute) {
    const auto t = monomial_product({3, 4}, {1, 2});
    EXPECT_EQ(t.set, (MajoranaIndexSet{1, 2, 3, 4}));
    EXPECT_EQ(t.phase, Phase::one());
}

TEST(MonomialProduct, SquareIsIdentity) {
    for (unsigned long long m = 0; m < 256; ++m) {
        auto s = MajoranaIndexSet::from_mask(m);
        if (!s.even()) continue;
        const auto t = monomial_product(s, s);
        EXPECT_TRUE(t.set.empty());
        EXPECT_EQ(t.phase, Phase::one());
    }
}

TEST(MonomialProduct, CommutationMatchesPhases) {
    for (unsigned long long a = 0; a < 64; ++a)
        for (unsigned long long b = 0; b < 64; ++b) {
            auto sa = MajoranaIndexSet::from_mask(a), sb = MajoranaIndexSet::from_mask(b);
            if (!sa.even() || !sb.even()) continue;
            const auto ab = monomial_product(sa, sb), ba = monomial_product(sb, sa);
            EXPECT_EQ(ab.set, ba.set);
            EXPECT_EQ(ab.phase == ba.phase, commutes(sa, sb));
        }
}

TEST(MonomialProduct, RejectsOddAndRange) {
    EXPECT_THROW(monomial_product({1}, {1, 2}), std::invalid_argument);
    EXPECT_THROW(monomial_product({1, 2}, {3, 10}, ModeCount(4)), std::out_of_range);
}

TEST(MajoranaIndexSetHash, DistinguishesSets) {
    std::unordered_set<MajoranaIndexSet, MajoranaIndexSetHash> s;
    for (unsigned long long m = 0; m < 1024; ++m) s.insert(MajoranaIndexSet::from_mask(m));
    EXPECT_EQ(s.size(), 1024u);
}
