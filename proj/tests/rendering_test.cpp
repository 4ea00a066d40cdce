#include <gtest/gtest.h>

#include <string>

#include "cishtex/image_io.hpp"
#include "cishtex/rendering.hpp"

namespace cishtex {
namespace {

RasterImage grey_image(int w, int h, std::uint8_t v = 100) {
    return RasterImage(w, h, std::vector<Rgb>(static_cast<std::size_t>(w) * h, Rgb{v, v, v}));
}

TEST(ClassMap, SingleTileIsOneSolidColor) {
    const auto img = grey_image(300, 300);
    const auto mask = TissueMask::all_inside(img);
    const std::vector<Tile> tiles = {Tile::circle(0, 150, 150, 150.0, mask)};
    const std::vector<int> labels = {3};
    const auto out = render_class_map(img, tiles, labels);
    const Rgb cls = default_palette()[3];
    const Rgb bg = dim_background(Rgb{100, 100, 100});
    for (int y = 0; y < 300; ++y)
        for (int x = 0; x < 300; ++x) EXPECT_EQ(out.at(x, y), tiles[0].contains(x, y) ? cls : bg) << x << "," << y;
    EXPECT_EQ(out.at(150, 150), cls);
    EXPECT_EQ(out.at(0, 0), bg);
}

TEST(ClassMap, OverlapSplitsAtTheBisector) {
    const auto img = grey_image(500, 300);
    const auto mask = TissueMask::all_inside(img);
    const std::vector<Tile> tiles = {Tile::circle(0, 150, 150, 150.0, mask), Tile::circle(1, 350, 150, 150.0, mask)};
    const std::vector<int> labels = {0, 1};
    const auto out = render_class_map(img, tiles, labels);
    const auto& pal = default_palette();
    for (int x = 200; x < 250; ++x) EXPECT_EQ(out.at(x, 150), pal[0]) << x;
    EXPECT_EQ(out.at(250, 150), pal[0]);  // equidistant: earlier tile wins
    for (int x = 251; x <= 300; ++x) EXPECT_EQ(out.at(x, 150), pal[1]) << x;
}

TEST(ClassMap, NoTilesMeansBackgroundOnly) {
    const auto img = grey_image(40, 30, 201);
    const auto out = render_class_map(img, std::vector<Tile>{}, std::vector<int>{});
    for (const auto& p : out.pixels()) EXPECT_EQ(p, (Rgb{80, 80, 80}));
}

TEST(ClassMap, TileCenterCarriesItsOwnLabel) {
    const auto img = grey_image(600, 600);
    const auto mask = TissueMask::all_inside(img);
    const auto tiles = build_grid(img, mask, TileSpec{});
    std::vector<int> labels;
    for (std::size_t i = 0; i < tiles.size(); ++i) labels.push_back(static_cast<int>(i % 10));
    const auto cls = class_index_map(600, 600, tiles, labels);
    for (std::size_t i = 0; i < tiles.size(); ++i)
        EXPECT_EQ(cls[static_cast<std::size_t>(tiles[i].cy()) * 600 + tiles[i].cx()], labels[i]);
}

TEST(ClassMap, DeterministicBytes) {
    const auto img = grey_image(600, 600);
    const auto mask = TissueMask::all_inside(img);
    const auto tiles = build_grid(img, mask, TileSpec{});
    const std::vector<int> labels = {2, 0, 1, 2};
    EXPECT_EQ(encode_png(render_class_map(img, tiles, labels)), encode_png(render_class_map(img, tiles, labels)));
}

TEST(ClassMap, RejectsBadLabels) {
    const auto img = grey_image(300, 300);
    const auto mask = TissueMask::all_inside(img);
    const std::vector<Tile> tiles = {Tile::circle(0, 150, 150, 150.0, mask)};
    EXPECT_THROW(render_class_map(img, tiles, std::vector<int>{10}), InvalidInput);
    EXPECT_THROW(render_class_map(img, tiles, std::vector<int>{-1}), InvalidInput);
    EXPECT_THROW(render_class_map(img, tiles, std::vector<int>{0, 1}), DimensionMismatch);
}

TEST(Legend, OneSwatchPerClass) {
    const auto legend = render_legend(4);
    EXPECT_EQ(legend.width(), 4 * 24);
    EXPECT_EQ(legend.height(), 24);
    for (int k = 0; k < 4; ++k) EXPECT_EQ(legend.at(k * 24 + 12, 12), default_palette()[k]);
    EXPECT_THROW(render_legend(11), InvalidInput);
}

TEST(FpcCurve, SortedCsv) {
    std::vector<SweepEntry> sweep = {{3, 0.5, 0, 0, true}, {2, 0.75, 0, 0, true}};
    EXPECT_EQ(render_fpc_curve(sweep), "c,fpc\n2,0.75\n3,0.5\n");
    EXPECT_THROW(render_fpc_curve({}), InvalidInput);
}

}  // namespace
}  // namespace cishtex
