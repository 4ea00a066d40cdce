#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "cishtex/clustering.hpp"
#include "test_helpers.hpp"

namespace cishtex {
namespace {

Matrix two_blobs(std::size_t per_blob, std::uint64_t seed, double spread = 0.05) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, spread);
    Matrix x(2 * per_blob, 2);
    for (std::size_t i = 0; i < per_blob; ++i) {
        x(i, 0) = g(rng);
        x(i, 1) = g(rng);
        x(per_blob + i, 0) = 10.0 + g(rng);
        x(per_blob + i, 1) = 10.0 + g(rng);
    }
    return x;
}

Matrix membership(std::initializer_list<std::initializer_list<double>> rows) {
    Matrix u(rows.size(), rows.begin()->size());
    std::size_t i = 0;
    for (const auto& r : rows) {
        std::size_t j = 0;
        for (double v : r) u(i, j++) = v;
        ++i;
    }
    return u;
}

TEST(Fcm, TwoSeparatedBlobs) {
    const auto x = two_blobs(100, 1);
    double mean[2][2] = {};
    for (std::size_t i = 0; i < 200; ++i)
        for (int d = 0; d < 2; ++d) mean[i / 100][d] += x(i, d) / 100.0;

    FcmConfig cfg;
    cfg.clusters = 2;
    const auto part = canonicalize(fcm(x, cfg));
    for (int k = 0; k < 2; ++k)
        for (int d = 0; d < 2; ++d) EXPECT_NEAR(part.centroids(k, d), mean[k][d], 1e-3);
    for (std::size_t i = 0; i < 200; ++i) EXPECT_GT(part.u(i, i / 100), 0.99);
    EXPECT_TRUE(part.converged);
}

TEST(Fcm, IdenticalPointsSplitEvenly) {
    Matrix x(6, 2, 1.5);
    FcmConfig cfg;
    cfg.clusters = 2;
    const auto part = fcm(x, cfg);
    for (std::size_t i = 0; i < 6; ++i)
        for (int k = 0; k < 2; ++k) EXPECT_NEAR(part.u(i, k), 0.5, 1e-12);
}

TEST(Fcm, OnePointPerClusterHasZeroObjective) {
    const auto x = membership({{0, 0}, {5, 0}, {0, 5}, {5, 5}});
    FcmConfig cfg;
    cfg.clusters = 4;
    const auto part = fcm(x, cfg);
    EXPECT_NEAR(part.objective, 0.0, 1e-6);
    EXPECT_NEAR(part.fpc, 1.0, 1e-6);
}

TEST(Fcm, RowsSumToOneAndObjectiveNeverIncreases) {
    std::mt19937_64 rng(5);
    const auto x = testing::random_matrix(150, 2, rng, 0.0, 4.0);
    FcmConfig cfg;
    cfg.clusters = 5;
    cfg.n_init = 3;
    double prev = INFINITY;
    int last_iter = 0;
    int seen = 0;
    fcm(x, cfg, [&](const FcmIteration& it) {
        if (it.iteration <= last_iter) prev = INFINITY;  // new restart
        last_iter = it.iteration;
        for (std::size_t i = 0; i < it.u.rows(); ++i) {
            double s = 0;
            for (std::size_t k = 0; k < it.u.cols(); ++k) {
                EXPECT_GE(it.u(i, k), 0.0);
                s += it.u(i, k);
            }
            EXPECT_NEAR(s, 1.0, 1e-9);
        }
        EXPECT_LE(it.objective, prev * (1 + 1e-12) + 1e-12);
        prev = it.objective;
        ++seen;
    });
    EXPECT_GT(seen, 3);
}

TEST(Fcm, SeededRunsAreReproducible) {
    std::mt19937_64 rng(7);
    const auto x = testing::random_matrix(80, 2, rng);
    FcmConfig cfg;
    cfg.clusters = 3;
    cfg.seed = 42;
    const auto a = fcm(x, cfg), b = fcm(x, cfg);
    EXPECT_EQ(a.u, b.u);
    EXPECT_EQ(a.centroids, b.centroids);
    EXPECT_EQ(a.objective, b.objective);
}

TEST(Fcm, ValidatesInputs) {
    Matrix x(3, 2, 0.0);
    FcmConfig cfg;
    cfg.clusters = 4;
    EXPECT_THROW(fcm(x, cfg), TooFewPoints);
    cfg.clusters = 2;
    cfg.m = 1.0;
    EXPECT_THROW(fcm(x, cfg), InvalidInput);
    cfg.m = 2.0;
    cfg.clusters = 1;
    EXPECT_THROW(fcm(x, cfg), InvalidInput);
}

TEST(Fpc, WorkedExamples) {
    EXPECT_DOUBLE_EQ(fpc(membership({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}})), 1.0);
    EXPECT_NEAR(fpc(membership({{1. / 3, 1. / 3, 1. / 3}, {1. / 3, 1. / 3, 1. / 3}})), 1.0 / 3.0, 1e-15);
    EXPECT_DOUBLE_EQ(fpc(membership({{1, 0}, {0.5, 0.5}})), 0.75);
}

TEST(Fpc, BoundsOnRandomPartitions) {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 1000; ++trial) {
        const int c = 2 + trial % 9;
        const int n = 1 + trial % 17;
        Matrix m(n, c);
        for (int i = 0; i < n; ++i) {
            double s = 0;
            for (int k = 0; k < c; ++k) s += (m(i, k) = u(rng));
            for (int k = 0; k < c; ++k) m(i, k) /= s;
        }
        const double v = fpc(m);
        EXPECT_GE(v, 1.0 / c - 1e-12);
        EXPECT_LE(v, 1.0 + 1e-12);
    }
}

TEST(Sweep, BlobsPeakAtTwo) {
    const auto x = two_blobs(60, 3, 0.3);
    FcmConfig cfg;
    const auto sweep = sweep_clusters(x, cfg);
    ASSERT_EQ(sweep.size(), 9u);
    EXPECT_EQ(sweep.front().clusters, 2);
    EXPECT_EQ(sweep.back().clusters, 10);
    const auto best = std::max_element(sweep.begin(), sweep.end(),
                                       [](const auto& a, const auto& b) { return a.fpc < b.fpc; });
    EXPECT_EQ(best->clusters, 2);
}

TEST(Sweep, UniformDataFavoursFewClusters) {
    std::mt19937_64 rng(9);
    const auto x = testing::random_matrix(300, 2, rng, 0.0, 1.0);
    FcmConfig cfg;
    cfg.n_init = 3;
    const auto sweep = sweep_clusters(x, cfg);
    EXPECT_GT(sweep.front().fpc, sweep.back().fpc);
}

TEST(Sweep, SingleValueRangeMatchesDirectRun) {
    std::mt19937_64 rng(10);
    const auto x = testing::random_matrix(60, 2, rng);
    FcmConfig cfg;
    cfg.clusters = 7;
    cfg.n_init = 2;
    cfg.seed = 11;
    const auto sweep = sweep_clusters(x, cfg, 7, 7);
    ASSERT_EQ(sweep.size(), 1u);
    const auto direct = fcm(x, cfg);
    EXPECT_EQ(sweep[0].fpc, direct.fpc);
    EXPECT_EQ(sweep[0].objective, direct.objective);
}

TEST(Sweep, RejectsBadRanges) {
    Matrix x(5, 2, 0.0);
    EXPECT_THROW(sweep_clusters(x, FcmConfig{}, 1, 3), InvalidInput);
    EXPECT_THROW(sweep_clusters(x, FcmConfig{}, 4, 3), InvalidInput);
    EXPECT_THROW(sweep_clusters(x, FcmConfig{}, 2, 10), TooFewPoints);
}

TEST(Canonicalize, SortsByFirstThenSecondComponent) {
    FuzzyPartition p;
    p.centroids = membership({{2.0, 0.0}, {-1.0, 5.0}, {-1.0, 3.0}});
    p.u = membership({{0.7, 0.2, 0.1}, {0.1, 0.3, 0.6}});
    const auto c = canonicalize(p);
    EXPECT_EQ(c.centroids, membership({{-1.0, 3.0}, {-1.0, 5.0}, {2.0, 0.0}}));
    EXPECT_EQ(c.u, membership({{0.1, 0.2, 0.7}, {0.6, 0.3, 0.1}}));
    EXPECT_EQ(canonicalize(c).centroids, c.centroids);
    EXPECT_EQ(canonicalize(c).u, c.u);
}

TEST(Canonicalize, RelabelledRunsAgree) {
    const auto x = two_blobs(30, 4);
    FcmConfig a, b;
    a.clusters = b.clusters = 2;
    a.seed = 1;
    b.seed = 2;
    const auto ca = canonicalize(fcm(x, a)), cb = canonicalize(fcm(x, b));
    EXPECT_EQ(hard_assign(ca), hard_assign(cb));
}

TEST(HardAssign, ArgmaxWithLowestIndexOnTies) {
    FuzzyPartition p;
    p.u = membership({{0.1, 0.6, 0.3}, {0.5, 0.5, 0.0}, {0.2, 0.4, 0.4}, {0.0, 0.0, 1.0}});
    EXPECT_EQ(hard_assign(p), (std::vector<int>{1, 0, 1, 2}));
}

}  // namespace
}  // namespace cishtex
