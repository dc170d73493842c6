#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <vector>

#include "fpc/rng.hpp"
#include "fpc/stats.hpp"

using namespace fpc;

TEST(Accumulator, MatchesTwoPassFormulas) {
    std::vector<double> xs = {1.5, -2.0, 3.25, 7.0, 0.0, 4.5};
    Accumulator a;
    for (double x : xs) a.add(x);
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= xs.size();
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    EXPECT_NEAR(a.mean, mean, 1e-14);
    EXPECT_NEAR(a.variance(), ss / (xs.size() - 1), 1e-13);
    EXPECT_NEAR(a.std_error(), std::sqrt(ss / (xs.size() - 1) / xs.size()), 1e-13);
}

TEST(Accumulator, MergeEqualsSequential) {
    Rng r(1, 0);
    Accumulator all, left, right;
    for (int i = 0; i < 1000; ++i) {
        double x = normal(r) * 3 + 1;
        all.add(x);
        (i < 377 ? left : right).add(x);
    }
    left.merge(right);
    EXPECT_EQ(left.n, all.n);
    EXPECT_NEAR(left.mean, all.mean, 1e-12);
    EXPECT_NEAR(left.variance(), all.variance(), 1e-10);
}

TEST(ParallelFor, EverySlotOnceAnyThreadCount) {
    for (int t : {1, 2, 5}) {
        std::vector<std::atomic<int>> hits(101);
        parallel_for(hits.size(), t, [&](size_t i) { hits[i]++; });
        for (auto& h : hits) EXPECT_EQ(h.load(), 1);
    }
}

TEST(ResolveThreads, ExplicitThenEnvironment) {
    EXPECT_EQ(resolve_threads(3), 3);
    setenv("FPC_THREADS", "2", 1);
    EXPECT_EQ(resolve_threads(0), 2);
    unsetenv("FPC_THREADS");
    EXPECT_GE(resolve_threads(0), 1);
}

TEST(LinearFit, ExactLine) {
    std::vector<double> x = {0, 1, 2, 3, 4}, y;
    for (double v : x) y.push_back(2.5 * v - 1.0);
    auto f = linear_fit(x, y);
    EXPECT_NEAR(f.slope, 2.5, 1e-12);
    EXPECT_NEAR(f.intercept, -1.0, 1e-12);
    EXPECT_NEAR(f.slope_se, 0.0, 1e-12);
    EXPECT_NEAR(f.r2, 1.0, 1e-12);
}

TEST(LinearFit, SlopeSeAgainstHandComputation) {
    std::vector<double> x = {0, 1, 2, 3}, y = {0.1, 0.9, 2.2, 2.8};
    auto f = linear_fit(x, y);
    // sxx = 5, sxy = 4.7
    EXPECT_NEAR(f.slope, 0.94, 1e-12);
    double rss = 0.0;
    for (int i = 0; i < 4; ++i) {
        double e = y[i] - (f.intercept + f.slope * x[i]);
        rss += e * e;
    }
    EXPECT_NEAR(f.slope_se, std::sqrt(rss / 2 / 5), 1e-12);
}

TEST(Chi2, KnownQuantiles) {
    EXPECT_NEAR(chi2_sf(3.841458820694124, 1), 0.05, 1e-9);
    EXPECT_NEAR(chi2_sf(9.487729036781154, 4), 0.05, 1e-9);
    EXPECT_NEAR(chi2_sf(0.0, 3), 1.0, 1e-15);
    std::vector<double> o = {10, 20, 30}, e = {20, 20, 20};
    EXPECT_NEAR(pearson_chi2(o, e), 10.0, 1e-12);
}

TEST(Ks, DetectsWrongDistribution) {
    Rng r(2, 0);
    std::vector<double> u(5000), sq(5000);
    for (size_t i = 0; i < u.size(); ++i) {
        u[i] = uniform01(r);
        sq[i] = u[i] * u[i];
    }
    auto cdf = [](double x) { return x; };
    EXPECT_GT(ks_pvalue(u, cdf), 0.001);
    EXPECT_LT(ks_pvalue(sq, cdf), 1e-6);
    std::vector<double> v(5000);
    for (auto& x : v) x = uniform01(r);
    EXPECT_GT(ks2_pvalue(u, v), 0.001);
    EXPECT_LT(ks2_pvalue(u, sq), 1e-6);
}
