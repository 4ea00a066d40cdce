#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cishtex/error.hpp"
#include "cishtex/imaging.hpp"
#include "cishtex/tiling.hpp"

namespace cishtex {

struct Offset {
    int dx = 0;
    int dy = 0;
    friend bool operator==(const Offset&, const Offset&) = default;
};

/// 0, 45, 90 and 135 degree neighbours at distance d.
inline std::vector<Offset> pooled_directions(int d) {
    return {{d, 0}, {d, d}, {0, d}, {-d, d}};
}

inline std::vector<Offset> horizontal_direction(int d) { return {{d, 0}}; }

/// Normalized symmetric gray-level co-occurrence matrix.
struct Glcm {
    int gray_levels = 0;
    int distance = 1;
    std::vector<Offset> directions;
    std::uint64_t pair_count = 0;  // ordered entries before normalization
    std::vector<double> p;         // gray_levels x gray_levels, row-major

    double operator()(int i, int j) const {
        return p[static_cast<std::size_t>(i) * gray_levels + j];
    }
};

/// Builds the GLCM of `plane` restricted to `tile`. A pixel pair counts only
/// when both endpoints are tile members; each pair adds to (a,b) and (b,a).
inline Glcm compute_glcm(const ChannelPlane& plane, const Tile& tile, int distance,
                         std::span<const Offset> directions) {
    if (distance < 1) throw InvalidInput("GLCM distance must be >= 1");
    if (directions.empty()) throw InvalidInput("GLCM needs at least one direction");
    check_gray_levels(plane.gray_levels);

    const int G = plane.gray_levels;
    std::vector<std::uint64_t> counts(static_cast<std::size_t>(G) * G, 0);
    std::uint64_t total = 0;
    tile.for_each_member([&](int x, int y) {
        const int a = plane.at(x, y);
        for (const auto& o : directions) {
            const int nx = x + o.dx, ny = y + o.dy;
            if (!tile.contains(nx, ny)) continue;
            const int b = plane.at(nx, ny);
            ++counts[static_cast<std::size_t>(a) * G + b];
            ++counts[static_cast<std::size_t>(b) * G + a];
            total += 2;
        }
    });
    if (total == 0)
        throw NoValidPairs("tile " + std::to_string(tile.id()) + " has no co-occurring pixel pairs");

    Glcm glcm;
    glcm.gray_levels = G;
    glcm.distance = distance;
    glcm.directions.assign(directions.begin(), directions.end());
    glcm.pair_count = total;
    glcm.p.resize(counts.size());
    const double inv = 1.0 / static_cast<double>(total);
    for (std::size_t k = 0; k < counts.size(); ++k)
        glcm.p[k] = static_cast<double>(counts[k]) * inv;
    return glcm;
}

inline Glcm compute_glcm(const ChannelPlane& plane, const Tile& tile, int distance = 1) {
    const auto dirs = pooled_directions(distance);
    return compute_glcm(plane, tile, distance, dirs);
}

inline constexpr int kHaralickCount = 13;
using HaralickFeatures = std::array<double, kHaralickCount>;

inline constexpr std::array<const char*, kHaralickCount> kHaralickNames = {
    "AngularSecondMoment", "Contrast",          "Correlation",   "SumOfSquares",
    "InverseDifferenceMoment", "SumAverage",    "SumVariance",   "SumEntropy",
    "Entropy",             "DifferenceVariance", "DifferenceEntropy",
    "InfoMeasureCorrelation1", "InfoMeasureCorrelation2"};

namespace detail {
inline double xlogx(double v) { return v > 0.0 ? v * std::log(v) : 0.0; }
}  // namespace detail

/// The 13 Haralick statistics F0..F12 of a normalized symmetric GLCM, using
/// 0-based gray levels and natural logarithms (0 ln 0 = 0).
///
/// Degenerate cases: correlation is 0 for a zero-variance marginal, IMC1 is 0
/// when the marginal entropy is 0, and the IMC2 exponent is clamped at 0.
/// Sum variance is taken about the sum average.
inline HaralickFeatures haralick_features(const Glcm& glcm) {
    const int G = glcm.gray_levels;
    std::vector<double> px(G, 0.0), p_sum(2 * G - 1, 0.0), p_diff(G, 0.0);

    double asm_ = 0.0, idm = 0.0, entropy = 0.0, ij_sum = 0.0;
    for (int i = 0; i < G; ++i) {
        for (int j = 0; j < G; ++j) {
            const double v = glcm(i, j);
            if (v == 0.0) continue;
            px[i] += v;
            p_sum[i + j] += v;
            p_diff[std::abs(i - j)] += v;
            asm_ += v * v;
            idm += v / (1.0 + static_cast<double>((i - j) * (i - j)));
            entropy -= detail::xlogx(v);
            ij_sum += static_cast<double>(i) * j * v;
        }
    }

    double mu = 0.0, hx = 0.0;
    for (int i = 0; i < G; ++i) {
        mu += i * px[i];
        hx -= detail::xlogx(px[i]);
    }
    double var = 0.0;
    for (int i = 0; i < G; ++i) var += (i - mu) * (i - mu) * px[i];

    double contrast = 0.0, diff_mean = 0.0, diff_entropy = 0.0;
    for (int k = 0; k < G; ++k) {
        contrast += static_cast<double>(k) * k * p_diff[k];
        diff_mean += k * p_diff[k];
        diff_entropy -= detail::xlogx(p_diff[k]);
    }
    double diff_var = 0.0;
    for (int k = 0; k < G; ++k) diff_var += (k - diff_mean) * (k - diff_mean) * p_diff[k];

    double sum_avg = 0.0, sum_entropy = 0.0;
    for (int k = 0; k < 2 * G - 1; ++k) {
        sum_avg += k * p_sum[k];
        sum_entropy -= detail::xlogx(p_sum[k]);
    }
    double sum_var = 0.0;
    for (int k = 0; k < 2 * G - 1; ++k) sum_var += (k - sum_avg) * (k - sum_avg) * p_sum[k];

    const double correlation = var > 0.0 ? std::clamp((ij_sum - mu * mu) / var, -1.0, 1.0) : 0.0;

    // The marginals are identical, so HX = HY and HXY1 = HXY2 = 2 HX.
    const double hxy = 2.0 * hx;
    const double imc1 = hx > 0.0 ? (entropy - hxy) / hx : 0.0;
    const double imc2 = std::sqrt(1.0 - std::exp(-2.0 * std::max(hxy - entropy, 0.0)));

    return {asm_,    contrast,    correlation, var,          idm,      sum_avg, sum_var,
            sum_entropy, entropy, diff_var,    diff_entropy, imc1,     imc2};
}

inline constexpr int kFeatureCount = 2 * kHaralickCount;

/// 26-value descriptor: F0..F12 on Brightness, then F0..F12 on Saturation.
struct FeatureVector {
    int tile_id = 0;
    int cx_px = 0;
    int cy_px = 0;
    std::array<double, kFeatureCount> values{};
};

inline std::vector<std::string> feature_column_names() {
    std::vector<std::string> names;
    for (const char* suffix : {"B", "S"})
        for (int f = 0; f < kHaralickCount; ++f)
            names.push_back("F" + std::to_string(f) + "_" + suffix);
    return names;
}

struct TextureParams {
    int gray_levels = 127;
    int distance = 1;
    bool pooled = true;  // false: single (d, 0) direction

    std::vector<Offset> directions() const {
        return pooled ? pooled_directions(distance) : horizontal_direction(distance);
    }
};

struct Extraction {
    std::vector<Tile> tiles;             // every tile of the grid
    std::vector<FeatureVector> features; // tile_id order, excluded tiles omitted
    std::vector<int> excluded_tile_ids;  // NoValidPairs in either channel
};

inline FeatureVector tile_features(const ChannelPlane& brightness, const ChannelPlane& saturation,
                                   const Tile& tile, const TextureParams& params) {
    const auto dirs = params.directions();
    FeatureVector fv;
    fv.tile_id = tile.id();
    fv.cx_px = tile.cx();
    fv.cy_px = tile.cy();
    const auto fb = haralick_features(compute_glcm(brightness, tile, params.distance, dirs));
    const auto fs = haralick_features(compute_glcm(saturation, tile, params.distance, dirs));
    std::copy(fb.begin(), fb.end(), fv.values.begin());
    std::copy(fs.begin(), fs.end(), fv.values.begin() + kHaralickCount);
    return fv;
}

inline Extraction extract_features(const RasterImage& image, const TissueMask& mask,
                                   const TileSpec& spec, const TextureParams& params) {
    Extraction out;
    out.tiles = build_grid(image, mask, spec);
    const auto brightness = quantize_channel(image, Channel::Brightness, params.gray_levels);
    const auto saturation = quantize_channel(image, Channel::Saturation, params.gray_levels);
    out.features.reserve(out.tiles.size());
    for (const auto& tile : out.tiles) {
        try {
            out.features.push_back(tile_features(brightness, saturation, tile, params));
        } catch (const NoValidPairs&) {
            out.excluded_tile_ids.push_back(tile.id());
        }
    }
    return out;
}

}  // namespace cishtex
