#include "fsaudit/common.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <set>

using namespace fsaudit;

TEST(Seeding, FnvMatchesPublishedVectors) {
    EXPECT_EQ(fnv1a64(""), 0xCBF29CE484222325ULL);
    EXPECT_EQ(fnv1a64("a"), 0xAF63DC4C8601EC8CULL);
}

TEST(Seeding, StreamIsSplitMix64) {
    // First outputs of the reference SplitMix64 generator seeded with 0.
    rng g(0);
    EXPECT_EQ(g(), 0xE220A8397B1DCDAFULL);
    EXPECT_EQ(g(), 0x6E789E6AA1B965F4ULL);
    EXPECT_EQ(g(), 0x06C45D188009454FULL);
}

TEST(Seeding, DerivedSeedsSeparateTags) {
    std::set<std::uint64_t> seen;
    for (std::uint64_t t = 0; t < 1000; ++t) {
        seen.insert(derive_seed(7, t));
    }
    EXPECT_EQ(seen.size(), 1000U);
    EXPECT_NE(derive_seed(7, "a"), derive_seed(7, "b"));
    EXPECT_NE(cell_seed(0, "sonar", 1), cell_seed(0, "sonar", 2));
    EXPECT_NE(cell_seed(0, "sonar", 1), cell_seed(0, "colon", 1));
    EXPECT_EQ(cell_seed(3, "sonar", 4), cell_seed(3, "sonar", 4));
}

TEST(Rng, BelowStaysInRangeAndCoversIt) {
    rng g(11);
    std::vector<int> hits(7, 0);
    for (int i = 0; i < 7000; ++i) {
        const auto v = g.below(7);
        ASSERT_LT(v, 7U);
        ++hits[v];
    }
    for (const int h : hits) {
        EXPECT_GT(h, 850);
        EXPECT_LT(h, 1150);
    }
}

TEST(Rng, UnitAndNormalMoments) {
    rng g(5);
    double su = 0.0;
    double sn = 0.0;
    double sn2 = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = g.unit();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        su += u;
        const double z = g.normal();
        sn += z;
        sn2 += z * z;
    }
    EXPECT_NEAR(su / n, 0.5, 0.005);
    EXPECT_NEAR(sn / n, 0.0, 0.01);
    EXPECT_NEAR(sn2 / n, 1.0, 0.02);
}

TEST(Rng, ShuffleIsADeterministicPermutation) {
    std::vector<int> a(50);
    std::iota(a.begin(), a.end(), 0);
    auto b = a;
    rng g1(9);
    rng g2(9);
    g1.shuffle(a);
    g2.shuffle(b);
    EXPECT_EQ(a, b);
    auto sorted = a;
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < 50; ++i) {
        EXPECT_EQ(sorted[static_cast<std::size_t>(i)], i);
    }
}
