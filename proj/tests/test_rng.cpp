#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "geqie/rng.hpp"

using geqie::CounterRng;

TEST(CounterRng, SequentialDrawsMatchRandomAccess) {
    CounterRng rng(42);
    for (uint64_t i = 0; i < 100; i++) {
        EXPECT_EQ(rng(), CounterRng::at(42, i));
    }
    EXPECT_EQ(rng.counter(), 100u);
}

TEST(CounterRng, SameKeySameStream) {
    CounterRng a(7), b(7), c(8);
    bool differs = false;
    for (int i = 0; i < 32; i++) {
        uint64_t x = a(), y = b(), z = c();
        EXPECT_EQ(x, y);
        differs |= x != z;
    }
    EXPECT_TRUE(differs);
}

TEST(CounterRng, UniformInHalfOpenUnitInterval) {
    CounterRng rng(1);
    double sum = 0;
    const int n = 200000;
    for (int i = 0; i < n; i++) {
        double u = rng.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        sum += u;
    }
    // mean of U(0,1) has sd 1/sqrt(12 n)
    EXPECT_NEAR(sum / n, 0.5, 5.0 / std::sqrt(12.0 * n));
}

TEST(CounterRng, DerivedSeedsAreDistinct) {
    std::set<uint64_t> seen;
    for (uint64_t id = 0; id < 1000; id++) {
        seen.insert(geqie::derive_seed(12345, id));
    }
    EXPECT_EQ(seen.size(), 1000u);
    EXPECT_NE(geqie::derive_seed(1, 5), geqie::derive_seed(2, 5));
}

TEST(CounterRng, WorksWithStandardDistributions) {
    CounterRng rng(99);
    std::uniform_int_distribution<int> dist(0, 9);
    std::vector<int> hist(10);
    for (int i = 0; i < 100000; i++) {
        hist[dist(rng)]++;
    }
    for (int h : hist) {
        EXPECT_NEAR(h, 10000, 500);
    }
}
