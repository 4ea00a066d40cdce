#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "cishtex/error.hpp"
#include "cishtex/imaging.hpp"

namespace cishtex {

struct TileSpec {
    double diameter_um = 150.0;
    double step_um = 100.0;
    double min_mask_fraction = 0.5;

    void validate() const {
        if (!(diameter_um > 0.0)) throw InvalidInput("tile diameter must be positive");
        if (!(step_um > 0.0)) throw InvalidInput("tile step must be positive");
        if (!(min_mask_fraction > 0.0 && min_mask_fraction <= 1.0))
            throw InvalidInput("min_mask_fraction must lie in (0, 1]");
    }
};

struct PixelBox {
    int x0 = 0, y0 = 0, x1 = 0, y1 = 0;  // half-open [x0, x1) x [y0, y1)

    int width() const noexcept { return x1 - x0; }
    int height() const noexcept { return y1 - y0; }
    friend bool operator==(const PixelBox&, const PixelBox&) = default;
};

/// A circular sampling region. Membership is stored as a bitmap over the
/// clipped bounding box of the circle.
class Tile {
public:
    Tile() = default;

    /// Circle of `radius_px` around (cx, cy), clipped to the image and
    /// restricted to mask pixels. Pixel (x, y) is a member iff
    /// (x - cx)^2 + (y - cy)^2 <= radius^2.
    static Tile circle(int tile_id, int cx, int cy, double radius_px, const TissueMask& mask) {
        Tile t;
        t.id_ = tile_id;
        t.cx_ = cx;
        t.cy_ = cy;
        t.radius_ = radius_px;
        const int reach = static_cast<int>(std::floor(radius_px));
        t.box_ = {std::max(0, cx - reach), std::max(0, cy - reach),
                  std::min(mask.width(), cx + reach + 1), std::min(mask.height(), cy + reach + 1)};
        t.box_.x1 = std::max(t.box_.x1, t.box_.x0);
        t.box_.y1 = std::max(t.box_.y1, t.box_.y0);
        t.bits_.assign(static_cast<std::size_t>(t.box_.width()) * t.box_.height(), 0);
        const double r2 = radius_px * radius_px;
        for (int y = t.box_.y0; y < t.box_.y1; ++y) {
            for (int x = t.box_.x0; x < t.box_.x1; ++x) {
                const double dx = x - cx, dy = y - cy;
                if (dx * dx + dy * dy <= r2 && mask.inside(x, y)) {
                    t.bits_[t.local(x, y)] = 1;
                    ++t.count_;
                }
            }
        }
        return t;
    }

    /// Arbitrary pixel set given as a bitmap over `box` (row-major).
    static Tile from_bitmap(int tile_id, PixelBox box, std::vector<std::uint8_t> bits) {
        if (bits.size() != static_cast<std::size_t>(box.width()) * box.height())
            throw DimensionMismatch("tile bitmap does not match its box");
        Tile t;
        t.id_ = tile_id;
        t.box_ = box;
        t.cx_ = box.x0 + box.width() / 2;
        t.cy_ = box.y0 + box.height() / 2;
        t.radius_ = 0.5 * std::hypot(box.width(), box.height());
        t.bits_ = std::move(bits);
        for (auto& b : t.bits_) {
            b = b ? 1 : 0;
            t.count_ += b;
        }
        return t;
    }

    int id() const noexcept { return id_; }
    int cx() const noexcept { return cx_; }
    int cy() const noexcept { return cy_; }
    double radius_px() const noexcept { return radius_; }
    const PixelBox& box() const noexcept { return box_; }
    std::size_t member_count() const noexcept { return count_; }

    bool contains(int x, int y) const {
        if (x < box_.x0 || x >= box_.x1 || y < box_.y0 || y >= box_.y1) return false;
        return bits_[local(x, y)] != 0;
    }

    template <class Fn>
    void for_each_member(Fn&& fn) const {
        for (int y = box_.y0; y < box_.y1; ++y)
            for (int x = box_.x0; x < box_.x1; ++x)
                if (bits_[local(x, y)]) fn(x, y);
    }

    friend bool operator==(const Tile&, const Tile&) = default;

private:
    std::size_t local(int x, int y) const {
        return static_cast<std::size_t>(y - box_.y0) * box_.width() + (x - box_.x0);
    }

    int id_ = 0;
    int cx_ = 0;
    int cy_ = 0;
    double radius_ = 0.0;
    PixelBox box_;
    std::vector<std::uint8_t> bits_;
    std::size_t count_ = 0;
};

struct GridGeometry {
    double radius_px = 0.0;
    double pitch_px = 0.0;
};

inline GridGeometry grid_geometry(const TileSpec& spec, double pixel_size_um) {
    return {spec.diameter_um / (2.0 * pixel_size_um), spec.step_um / pixel_size_um};
}

/// Lattice coordinates along one axis: r, r + pitch, ... while the circle
/// still fits inside [0, extent].
inline std::vector<int> lattice_positions(double radius_px, double pitch_px, int extent) {
    std::vector<int> out;
    for (long i = 0;; ++i) {
        const double c = radius_px + static_cast<double>(i) * pitch_px;
        if (c + radius_px > extent) break;
        out.push_back(static_cast<int>(std::lround(c)));
    }
    return out;
}

inline double nominal_tile_area(double radius_px) {
    return std::numbers::pi * radius_px * radius_px;
}

/// Square lattice of circular tiles, row-major, keeping tiles whose masked
/// pixel count reaches min_mask_fraction of the nominal circle area.
inline std::vector<Tile> build_grid(const RasterImage& image, const TissueMask& mask,
                                    const TileSpec& spec) {
    spec.validate();
    if (!mask.matches(image)) throw DimensionMismatch("mask and image dimensions differ");
    const auto geo = grid_geometry(spec, image.pixel_size_um());
    const auto xs = lattice_positions(geo.radius_px, geo.pitch_px, image.width());
    const auto ys = lattice_positions(geo.radius_px, geo.pitch_px, image.height());
    const double min_count = spec.min_mask_fraction * nominal_tile_area(geo.radius_px);

    std::vector<Tile> tiles;
    int next_id = 0;
    for (int cy : ys) {
        for (int cx : xs) {
            Tile t = Tile::circle(next_id, cx, cy, geo.radius_px, mask);
            if (static_cast<double>(t.member_count()) >= min_count) {
                tiles.push_back(std::move(t));
                ++next_id;
            }
        }
    }
    if (tiles.empty())
        throw EmptyGrid("no tile reaches " + std::to_string(spec.min_mask_fraction) +
                        " mask coverage");
    return tiles;
}

}  // namespace cishtex
