// cishtex: command-line driver for the texture classification pipeline.

#include <CLI11.hpp>

#include <cstdint>
#include <functional>
#include <iostream>
#include <optional>
#include <string>

#include "cishtex/pipeline.hpp"

namespace {

struct Overrides {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string image;
    std::string mask;
    std::string annotations;
    std::optional<int> clusters;
    std::string method;
    std::optional<int> bins;
    std::optional<double> tile_um;
    std::optional<double> step_um;
    std::optional<double> pixel_um;
};

cishtex::RunConfig resolve(const Overrides& o) {
    cishtex::RunConfig cfg = o.config.empty() ? cishtex::RunConfig{} : cishtex::load_config(o.config);
    if (o.seed) cfg.seed = *o.seed;
    if (!o.out.empty()) cfg.output_dir = o.out;
    if (!o.image.empty()) cfg.image_path = o.image;
    if (!o.mask.empty()) cfg.mask_path = o.mask;
    if (!o.annotations.empty()) cfg.annotations_path = o.annotations;
    if (o.clusters) cfg.fcm.clusters = *o.clusters;
    if (!o.method.empty()) {
        if (o.method != "svd" && o.method != "pca") throw cishtex::ConfigInvalid("--method must be svd or pca");
        cfg.method = o.method == "svd" ? cishtex::ReductionMethod::Svd : cishtex::ReductionMethod::Pca;
    }
    if (o.bins) cfg.gray_levels = *o.bins;
    if (o.tile_um) cfg.tile.diameter_um = *o.tile_um;
    if (o.step_um) cfg.tile.step_um = *o.step_um;
    if (o.pixel_um) cfg.pixel_size_um = *o.pixel_um;
    cfg.validate();
    return cfg;
}

void report(const cishtex::StageRecord& r) {
    std::cout << r.stage << ":";
    for (const auto& [file, digest] : r.outputs) std::cout << " " << file;
    std::cout << "\n";
    for (const auto& w : r.warnings) std::cerr << "warning: " << r.stage << ": " << w << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"CISH whole-slide texture classification: Haralick features, SVD/PCA, fuzzy c-means"};
    app.set_version_flag("--version", cishtex::kToolVersion);
    app.require_subcommand(1);

    Overrides o;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config, "JSON run configuration");
        sub->add_option("--seed", o.seed, "global seed");
        sub->add_option("--out", o.out, "output directory");
        sub->add_option("--image", o.image, "8-bit RGB PNG or uncompressed TIFF");
        sub->add_option("--mask", o.mask, "tissue mask PNG (nonzero = tissue)");
        sub->add_option("--pixel-um", o.pixel_um, "micrometres per pixel");
        sub->add_option("--clusters", o.clusters, "fuzzy c-means cluster count");
        sub->add_option("--method", o.method, "reduction method: svd | pca");
        sub->add_option("--bins", o.bins, "gray levels per channel");
        sub->add_option("--tile-um", o.tile_um, "tile diameter in micrometres");
        sub->add_option("--step-um", o.step_um, "tile step in micrometres");
        sub->add_option("--annotations", o.annotations, "annotations.csv for aggregate");
    };

    using Stage = std::function<void(const cishtex::RunConfig&)>;
    auto single = [](cishtex::StageRecord (*fn)(const cishtex::RunConfig&)) -> Stage {
        return [fn](const cishtex::RunConfig& c) { report(fn(c)); };
    };
    const std::vector<std::tuple<const char*, const char*, Stage>> stages = {
        {"extract", "tile the image and write features.csv", single(cishtex::cmd_extract)},
        {"reduce", "reduce features.csv to reduced.csv", single(cishtex::cmd_reduce)},
        {"cluster", "fuzzy c-means on reduced.csv -> clusters.csv", single(cishtex::cmd_cluster)},
        {"sweep", "FPC sweep over the cluster range -> fpc.csv", single(cishtex::cmd_sweep)},
        {"render", "class color map and legend PNGs", single(cishtex::cmd_render)},
        {"sample", "blinded tile sample -> manifest.json + crops", single(cishtex::cmd_sample)},
        {"aggregate", "weighted expert grades -> report.json", single(cishtex::cmd_aggregate)},
        {"pipeline", "extract, reduce, cluster, render, sample",
         [](const cishtex::RunConfig& c) {
             for (const auto& r : cishtex::cmd_pipeline(c)) report(r);
         }},
    };

    Stage chosen;
    for (const auto& [name, help, fn] : stages) {
        auto* sub = app.add_subcommand(name, help);
        add_common(sub);
        sub->callback([&chosen, fn = fn] { chosen = fn; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        chosen(resolve(o));
    } catch (const cishtex::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: Internal: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
