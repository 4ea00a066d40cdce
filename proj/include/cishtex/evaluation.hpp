#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "cishtex/error.hpp"
#include "cishtex/random.hpp"
#include "cishtex/tiling.hpp"

namespace cishtex {

/// Expression strength none/low/moderate/strong = 0..3; pattern none/sparse/dense = 0..2.
struct GradingScheme {
    static constexpr int kMaxStrength = 3;
    static constexpr int kMaxPattern = 2;
    static constexpr std::array<const char*, 4> kStrengthNames = {"none", "low", "moderate", "strong"};
    static constexpr std::array<const char*, 3> kPatternNames = {"none", "sparse", "dense"};
};

// ---------------------------------------------------------------------------
// Sampling

struct SampleCandidate {
    int tile_id = 0;
    int label = 0;
    PixelBox bbox;
};

struct ManifestEntry {
    int tile_id = 0;
    PixelBox bbox;
    int hidden_class = 0;
    int order = 0;  // position in the blinded presentation sequence
};

struct SampleManifest {
    std::vector<ManifestEntry> entries;  // grouped by class, tile_id ascending
    std::vector<std::string> warnings;
};

/// Draws up to `per_class` tiles per class without replacement, then assigns
/// a seeded presentation order over all drawn tiles.
inline SampleManifest sample_tiles(std::vector<SampleCandidate> candidates, int per_class, std::uint64_t seed) {
    if (per_class < 1) throw InvalidInput("per-class sample size must be >= 1");
    std::stable_sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
        return a.label != b.label ? a.label < b.label : a.tile_id < b.tile_id;
    });
    std::map<int, std::vector<SampleCandidate>> by_class;
    for (const auto& c : candidates) by_class[c.label].push_back(c);

    SampleManifest out;
    for (auto& [label, members] : by_class) {
        std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(label)));
        const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(per_class), members.size());
        if (take < static_cast<std::size_t>(per_class))
            out.warnings.push_back("class " + std::to_string(label) + " has only " +
                                   std::to_string(members.size()) + " tile(s); sampled exhaustively");
        // Partial Fisher-Yates: the first `take` slots become the sample.
        for (std::size_t i = 0; i < take; ++i) {
            const auto j = i + uniform_below(rng, members.size() - i);
            std::swap(members[i], members[j]);
        }
        std::vector<SampleCandidate> chosen(members.begin(), members.begin() + static_cast<long>(take));
        std::sort(chosen.begin(), chosen.end(), [](const auto& a, const auto& b) { return a.tile_id < b.tile_id; });
        for (const auto& c : chosen) out.entries.push_back({c.tile_id, c.bbox, c.label, 0});
    }

    std::vector<int> order(out.entries.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::mt19937_64 rng(mix_seed(seed, fnv1a64("presentation-order")));
    seeded_shuffle(order.begin(), order.end(), rng);
    for (std::size_t pos = 0; pos < order.size(); ++pos) out.entries[static_cast<std::size_t>(order[pos])].order = static_cast<int>(pos);
    return out;
}

// ---------------------------------------------------------------------------
// Aggregation

/// One evaluator's score for a tile (tile_id >= 0) or for a whole class
/// (tile_id == -1, class_id >= 0).
struct AnnotationRecord {
    std::string evaluator_id;
    double weight = 1.0;
    int tile_id = -1;
    int class_id = -1;
    int strength = 0;
    int pattern = 0;

    bool is_class_level() const noexcept { return tile_id < 0; }
};

/// Grades are the weighted means rounded half away from zero.
struct WeightedGrade {
    double strength_mean = 0.0;
    double pattern_mean = 0.0;
    int strength = 0;
    int pattern = 0;
    int coverage = 0;  // number of records that contributed
};

struct TileGrade {
    int tile_id = 0;
    WeightedGrade grade;
};

struct ClassGrade {
    int class_id = 0;
    int strength = 0;
    int pattern = 0;
    WeightedGrade detail;
};

namespace detail {

inline void validate_record(const AnnotationRecord& r) {
    if (!(r.weight > 0.0) || !std::isfinite(r.weight))
        throw InvalidInput("evaluator '" + r.evaluator_id + "' has a non-positive weight");
    if (r.strength < 0 || r.strength > GradingScheme::kMaxStrength)
        throw OutOfRangeScore("strength " + std::to_string(r.strength) + " from '" + r.evaluator_id + "'");
    if (r.pattern < 0 || r.pattern > GradingScheme::kMaxPattern)
        throw OutOfRangeScore("pattern " + std::to_string(r.pattern) + " from '" + r.evaluator_id + "'");
}

inline int round_half_away(double v) { return static_cast<int>(std::round(v)); }

struct Accumulator {
    double w = 0.0, ws = 0.0, wp = 0.0;
    int n = 0;

    void add(const AnnotationRecord& r) {
        w += r.weight;
        ws += r.weight * r.strength;
        wp += r.weight * r.pattern;
        ++n;
    }
    WeightedGrade grade() const {
        WeightedGrade g;
        g.strength_mean = ws / w;
        g.pattern_mean = wp / w;
        g.strength = round_half_away(g.strength_mean);
        g.pattern = round_half_away(g.pattern_mean);
        g.coverage = n;
        return g;
    }
};

}  // namespace detail

/// Weighted mean per tile over the evaluators who scored it. Class-level
/// records are ignored here. With `known_tiles`, any other tile id is an error.
inline std::vector<TileGrade> aggregate(const std::vector<AnnotationRecord>& records,
                                        const std::optional<std::set<int>>& known_tiles = std::nullopt) {
    std::map<int, detail::Accumulator> acc;
    for (const auto& r : records) {
        if (r.is_class_level()) continue;
        detail::validate_record(r);
        if (known_tiles && !known_tiles->contains(r.tile_id))
            throw UnknownTile("tile " + std::to_string(r.tile_id) + " is not in the manifest");
        acc[r.tile_id].add(r);
    }
    std::vector<TileGrade> out;
    out.reserve(acc.size());
    for (const auto& [tile, a] : acc) out.push_back({tile, a.grade()});
    return out;
}

/// Consensus grade per class from class-level records; every class in
/// [0, classes) must be scored.
inline std::vector<ClassGrade> grade_classes(const std::vector<AnnotationRecord>& records, int classes) {
    std::vector<detail::Accumulator> acc(static_cast<std::size_t>(std::max(classes, 0)));
    for (const auto& r : records) {
        if (!r.is_class_level()) continue;
        detail::validate_record(r);
        if (r.class_id < 0 || r.class_id >= classes)
            throw InvalidInput("class id " + std::to_string(r.class_id) + " outside [0, " +
                               std::to_string(classes) + ")");
        acc[static_cast<std::size_t>(r.class_id)].add(r);
    }
    std::vector<ClassGrade> out;
    for (int k = 0; k < classes; ++k) {
        const auto& a = acc[static_cast<std::size_t>(k)];
        if (a.n == 0) throw MissingClassScore("class " + std::to_string(k) + " has no class-level score");
        const auto g = a.grade();
        out.push_back({k, g.strength, g.pattern, g});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Confusion

template <std::size_t N>
struct AxisConfusion {
    std::array<std::array<int, N>, N> matrix{};  // [expert][class-derived]
    int total = 0;
    int correct = 0;
    int adjacent = 0;  // |expert - class| <= 1

    double accuracy() const { return total ? static_cast<double>(correct) / total : 0.0; }
    double adjacent_accuracy() const { return total ? static_cast<double>(adjacent) / total : 0.0; }

    void add(int expert, int derived) {
        ++matrix[static_cast<std::size_t>(expert)][static_cast<std::size_t>(derived)];
        ++total;
        if (expert == derived) ++correct;
        if (std::abs(expert - derived) <= 1) ++adjacent;
    }
};

struct EvaluatedTile {
    int tile_id = 0;
    int label = 0;
    WeightedGrade expert;
    int class_strength = 0;
    int class_pattern = 0;
};

struct EvaluationReport {
    AxisConfusion<4> strength;
    AxisConfusion<3> pattern;
    std::vector<EvaluatedTile> tiles;
    std::vector<ClassGrade> classes;
};

/// Compares each tile's expert grade with the grade of the class the tile was
/// clustered into. `labels` maps tile id to cluster label.
inline EvaluationReport confusion(const std::vector<TileGrade>& tile_grades,
                                  const std::vector<ClassGrade>& class_grades,
                                  const std::map<int, int>& labels) {
    std::map<int, const ClassGrade*> by_class;
    for (const auto& c : class_grades) by_class[c.class_id] = &c;

    EvaluationReport report;
    report.classes = class_grades;
    for (const auto& tg : tile_grades) {
        const auto lit = labels.find(tg.tile_id);
        if (lit == labels.end()) throw UnknownTile("tile " + std::to_string(tg.tile_id) + " has no cluster label");
        const auto cit = by_class.find(lit->second);
        if (cit == by_class.end())
            throw MissingClassScore("class " + std::to_string(lit->second) + " has no grade");
        const ClassGrade& cg = *cit->second;
        report.strength.add(tg.grade.strength, cg.strength);
        report.pattern.add(tg.grade.pattern, cg.pattern);
        report.tiles.push_back({tg.tile_id, lit->second, tg.grade, cg.strength, cg.pattern});
    }
    return report;
}

}  // namespace cishtex
