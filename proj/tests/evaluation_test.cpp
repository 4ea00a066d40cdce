#include <gtest/gtest.h>

#include <random>
#include <set>

#include "cishtex/evaluation.hpp"

namespace cishtex {
namespace {

const double kWeights[4] = {3, 2, 1, 1};

std::vector<AnnotationRecord> four_evaluators(int tile, const int (&strength)[4], const int (&pattern)[4],
                                              double scale = 1.0) {
    std::vector<AnnotationRecord> out;
    for (int e = 0; e < 4; ++e)
        out.push_back({"e" + std::to_string(e + 1), kWeights[e] * scale, tile, -1, strength[e], pattern[e]});
    return out;
}

std::vector<AnnotationRecord> class_records(int cls, const int (&strength)[4], const int (&pattern)[4]) {
    std::vector<AnnotationRecord> out;
    for (int e = 0; e < 4; ++e)
        out.push_back({"e" + std::to_string(e + 1), kWeights[e], -1, cls, strength[e], pattern[e]});
    return out;
}

TEST(Aggregate, WeightedMeanIsExactlyTwo) {
    const auto g = aggregate(four_evaluators(5, {3, 2, 1, 0}, {0, 0, 0, 0}));
    ASSERT_EQ(g.size(), 1u);
    EXPECT_EQ(g[0].tile_id, 5);
    EXPECT_EQ(g[0].grade.strength_mean, 2.0);
    EXPECT_EQ(g[0].grade.strength, 2);
    EXPECT_EQ(g[0].grade.coverage, 4);
}

TEST(Aggregate, FractionalMeanRounds) {
    const auto g = aggregate(four_evaluators(0, {1, 1, 0, 0}, {2, 2, 1, 1}));
    EXPECT_NEAR(g[0].grade.strength_mean, 5.0 / 7.0, 1e-15);
    EXPECT_EQ(g[0].grade.strength, 1);
    EXPECT_NEAR(g[0].grade.pattern_mean, 12.0 / 7.0, 1e-15);
    EXPECT_EQ(g[0].grade.pattern, 2);
}

TEST(Aggregate, HalfRoundsAwayFromZero) {
    std::vector<AnnotationRecord> r = {{"a", 1, 0, -1, 1, 0}, {"b", 1, 0, -1, 2, 1}};
    const auto g = aggregate(r);
    EXPECT_EQ(g[0].grade.strength, 2);  // 1.5
    EXPECT_EQ(g[0].grade.pattern, 1);   // 0.5
}

TEST(Aggregate, UnanimousGradeIsExact) {
    for (int s = 0; s <= 3; ++s) {
        const auto g = aggregate(four_evaluators(1, {s, s, s, s}, {1, 1, 1, 1}));
        EXPECT_EQ(g[0].grade.strength_mean, static_cast<double>(s));
        EXPECT_EQ(g[0].grade.strength, s);
    }
}

TEST(Aggregate, MissingEvaluatorRenormalizes) {
    std::vector<AnnotationRecord> r = {{"e1", 3, 0, -1, 3, 2}, {"e2", 2, 0, -1, 0, 0}, {"e1", 3, 1, -1, 1, 1}};
    const auto g = aggregate(r);
    ASSERT_EQ(g.size(), 2u);
    EXPECT_NEAR(g[0].grade.strength_mean, 9.0 / 5.0, 1e-15);
    EXPECT_EQ(g[0].grade.coverage, 2);
    EXPECT_EQ(g[1].grade.strength_mean, 1.0);
    EXPECT_EQ(g[1].grade.coverage, 1);
}

TEST(Aggregate, WeightScalingInvariance) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        int s[4], p[4];
        for (int e = 0; e < 4; ++e) {
            s[e] = static_cast<int>(rng() % 4);
            p[e] = static_cast<int>(rng() % 3);
        }
        const auto a = aggregate(four_evaluators(0, s, p));
        const auto b = aggregate(four_evaluators(0, s, p, 10.0));
        EXPECT_NEAR(a[0].grade.strength_mean, b[0].grade.strength_mean, 1e-12);
        EXPECT_EQ(a[0].grade.strength, b[0].grade.strength);
        EXPECT_EQ(a[0].grade.pattern, b[0].grade.pattern);
        // Convex combination stays inside the range of the inputs.
        EXPECT_GE(a[0].grade.strength_mean, *std::min_element(s, s + 4));
        EXPECT_LE(a[0].grade.strength_mean, *std::max_element(s, s + 4));
    }
}

TEST(Aggregate, Errors) {
    EXPECT_THROW(aggregate({{"e", 1, 0, -1, 4, 0}}), OutOfRangeScore);
    EXPECT_THROW(aggregate({{"e", 1, 0, -1, -1, 0}}), OutOfRangeScore);
    EXPECT_THROW(aggregate({{"e", 1, 0, -1, 0, 3}}), OutOfRangeScore);
    EXPECT_THROW(aggregate({{"e", 1, 9, -1, 1, 1}}, std::set<int>{1, 2}), UnknownTile);
    EXPECT_THROW(aggregate({{"e", 0, 1, -1, 1, 1}}), InvalidInput);
}

TEST(GradeClasses, Examples) {
    auto r = class_records(0, {3, 3, 3, 3}, {2, 2, 2, 2});
    const auto r1 = class_records(1, {2, 2, 3, 3}, {0, 0, 0, 0});
    r.insert(r.end(), r1.begin(), r1.end());
    r.push_back({"solo", 1, -1, 2, 1, 1});
    const auto g = grade_classes(r, 3);
    ASSERT_EQ(g.size(), 3u);
    EXPECT_EQ(g[0].strength, 3);
    EXPECT_EQ(g[0].pattern, 2);
    EXPECT_NEAR(g[1].detail.strength_mean, 16.0 / 7.0, 1e-15);
    EXPECT_EQ(g[1].strength, 2);
    EXPECT_EQ(g[2].strength, 1);
    EXPECT_EQ(g[2].pattern, 1);
    EXPECT_THROW(grade_classes(r, 4), MissingClassScore);
}

std::vector<TileGrade> tiles_with(int n, int strength, int pattern) {
    std::vector<TileGrade> out;
    for (int i = 0; i < n; ++i) {
        WeightedGrade g;
        g.strength = strength;
        g.pattern = pattern;
        g.strength_mean = strength;
        g.pattern_mean = pattern;
        out.push_back({i, g});
    }
    return out;
}

std::map<int, int> all_class(int n, int label) {
    std::map<int, int> m;
    for (int i = 0; i < n; ++i) m[i] = label;
    return m;
}

TEST(Confusion, PerfectAgreement) {
    const auto rep = confusion(tiles_with(70, 3, 2), {{0, 3, 2, {}}}, all_class(70, 0));
    EXPECT_EQ(rep.strength.total, 70);
    EXPECT_EQ(rep.strength.matrix[3][3], 70);
    EXPECT_EQ(rep.strength.accuracy(), 1.0);
    EXPECT_EQ(rep.strength.adjacent_accuracy(), 1.0);
    EXPECT_EQ(rep.pattern.accuracy(), 1.0);
}

TEST(Confusion, OneOffByOne) {
    auto tiles = tiles_with(70, 3, 2);
    tiles[10].grade.strength = 2;
    const auto rep = confusion(tiles, {{0, 3, 2, {}}}, all_class(70, 0));
    EXPECT_DOUBLE_EQ(rep.strength.accuracy(), 69.0 / 70.0);
    EXPECT_EQ(rep.strength.adjacent_accuracy(), 1.0);
    EXPECT_EQ(rep.strength.matrix[2][3], 1);
}

TEST(Confusion, TotalDisagreement) {
    const auto rep = confusion(tiles_with(20, 0, 0), {{0, 3, 2, {}}}, all_class(20, 0));
    EXPECT_EQ(rep.strength.accuracy(), 0.0);
    EXPECT_EQ(rep.strength.adjacent_accuracy(), 0.0);
    EXPECT_EQ(rep.strength.matrix[0][3], 20);
    int sum = 0;
    for (const auto& row : rep.pattern.matrix)
        for (int v : row) sum += v;
    EXPECT_EQ(sum, 20);
}

TEST(Confusion, MissingData) {
    EXPECT_THROW(confusion(tiles_with(2, 0, 0), {{0, 0, 0, {}}}, all_class(1, 0)), UnknownTile);
    EXPECT_THROW(confusion(tiles_with(2, 0, 0), {{0, 0, 0, {}}}, all_class(2, 1)), MissingClassScore);
}

std::vector<SampleCandidate> candidates(const std::vector<int>& class_sizes) {
    std::vector<SampleCandidate> out;
    int id = 0;
    for (std::size_t k = 0; k < class_sizes.size(); ++k)
        for (int i = 0; i < class_sizes[k]; ++i, ++id) out.push_back({id, static_cast<int>(k), {id, 0, id + 10, 10}});
    return out;
}

TEST(Sampling, SevenClassesGiveSeventyEntries) {
    const auto m = sample_tiles(candidates({12, 30, 10, 15, 40, 11, 25}), 10, 1);
    EXPECT_EQ(m.entries.size(), 70u);
    EXPECT_TRUE(m.warnings.empty());
    std::set<int> ids, orders;
    std::map<int, int> per_class;
    for (const auto& e : m.entries) {
        ids.insert(e.tile_id);
        orders.insert(e.order);
        ++per_class[e.hidden_class];
        EXPECT_EQ(e.bbox.x0, e.tile_id);
    }
    EXPECT_EQ(ids.size(), 70u);
    EXPECT_EQ(orders.size(), 70u);
    EXPECT_EQ(*orders.begin(), 0);
    EXPECT_EQ(*orders.rbegin(), 69);
    for (const auto& [k, n] : per_class) EXPECT_EQ(n, 10) << k;
}

TEST(Sampling, ShortClassIsExhaustedWithWarning) {
    const auto m = sample_tiles(candidates({20, 3}), 10, 5);
    EXPECT_EQ(m.entries.size(), 13u);
    ASSERT_EQ(m.warnings.size(), 1u);
    int short_class = 0;
    for (const auto& e : m.entries) short_class += e.hidden_class == 1;
    EXPECT_EQ(short_class, 3);
}

TEST(Sampling, SeedDeterminesManifest) {
    const auto c = candidates({50, 50, 50});
    const auto a = sample_tiles(c, 10, 77), b = sample_tiles(c, 10, 77), d = sample_tiles(c, 10, 78);
    ASSERT_EQ(a.entries.size(), b.entries.size());
    bool differs = false;
    for (std::size_t i = 0; i < a.entries.size(); ++i) {
        EXPECT_EQ(a.entries[i].tile_id, b.entries[i].tile_id);
        EXPECT_EQ(a.entries[i].order, b.entries[i].order);
        differs |= a.entries[i].tile_id != d.entries[i].tile_id;
    }
    EXPECT_TRUE(differs);
}

TEST(Sampling, InputOrderDoesNotMatter) {
    auto c = candidates({30, 30});
    const auto a = sample_tiles(c, 5, 9);
    std::reverse(c.begin(), c.end());
    const auto b = sample_tiles(c, 5, 9);
    for (std::size_t i = 0; i < a.entries.size(); ++i) {
        EXPECT_EQ(a.entries[i].tile_id, b.entries[i].tile_id);
        EXPECT_EQ(a.entries[i].order, b.entries[i].order);
    }
    EXPECT_THROW(sample_tiles(c, 0, 1), InvalidInput);
}

}  // namespace
}  // namespace cishtex
