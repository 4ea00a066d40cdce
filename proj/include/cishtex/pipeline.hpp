#pragma once

// Stage orchestration. Every stage reads its inputs from the output directory
// (or the configured image/mask), writes its artifacts atomically and records
// them with their SHA-256 in run_manifest.json.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "cishtex/artifacts.hpp"
#include "cishtex/clustering.hpp"
#include "cishtex/digest.hpp"
#include "cishtex/error.hpp"
#include "cishtex/evaluation.hpp"
#include "cishtex/fileio.hpp"
#include "cishtex/image_io.hpp"
#include "cishtex/random.hpp"
#include "cishtex/reduction.hpp"
#include "cishtex/rendering.hpp"
#include "cishtex/texture.hpp"
#include "cishtex/tiling.hpp"

namespace cishtex {

inline constexpr const char* kToolVersion = "0.1.0";

struct RunConfig {
    std::filesystem::path image_path;
    std::optional<std::filesystem::path> mask_path;
    double pixel_size_um = 0.5;
    TileSpec tile;
    int gray_levels = 127;
    int distance = 1;
    bool pooled_directions = true;
    ReductionMethod method = ReductionMethod::Pca;
    bool standardize = true;
    int components = 2;
    FcmConfig fcm;  // seed is derived from `seed`
    int sweep_min = 2;
    int sweep_max = 10;
    int samples_per_class = 10;
    std::optional<std::filesystem::path> annotations_path;
    std::uint64_t seed = 0;
    std::filesystem::path output_dir = "out";

    TextureParams texture() const { return {gray_levels, distance, pooled_directions}; }

    FcmConfig fcm_config() const {
        FcmConfig c = fcm;
        c.seed = stage_seed(seed, "fcm");
        return c;
    }

    void validate() const {
        auto bad = [](const std::string& m) { throw ConfigInvalid(m); };
        if (!(pixel_size_um > 0.0)) bad("pixel_size_um must be positive");
        if (!(tile.diameter_um > 0.0)) bad("tile.diameter_um must be positive");
        if (!(tile.step_um > 0.0)) bad("tile.step_um must be positive");
        if (!(tile.min_mask_fraction > 0.0 && tile.min_mask_fraction <= 1.0))
            bad("tile.min_mask_fraction must lie in (0, 1]");
        if (gray_levels < 2 || gray_levels > 65536) bad("gray_levels must lie in [2, 65536]");
        if (distance < 1) bad("distance must be >= 1");
        if (components < 1 || components > kFeatureCount) bad("components must lie in [1, 26]");
        if (fcm.clusters < 2) bad("fcm.clusters must be >= 2");
        if (static_cast<std::size_t>(fcm.clusters) > default_palette().size())
            bad("fcm.clusters exceeds the 10-color palette");
        if (!(fcm.m > 1.0)) bad("fcm.m must be > 1");
        if (!(fcm.tol > 0.0)) bad("fcm.tol must be positive");
        if (fcm.max_iter < 1) bad("fcm.max_iter must be >= 1");
        if (fcm.n_init < 1) bad("fcm.n_init must be >= 1");
        if (sweep_min < 2 || sweep_max < sweep_min) bad("sweep range must satisfy 2 <= min <= max");
        if (samples_per_class < 1) bad("sampling.per_class must be >= 1");
    }

    void require_image() const {
        if (image_path.empty()) throw ConfigInvalid("image_path is required");
    }
};

inline nlohmann::json config_to_json(const RunConfig& c) {
    using nlohmann::json;
    json j;
    j["image_path"] = c.image_path.string();
    j["mask_path"] = c.mask_path ? json(c.mask_path->string()) : json(nullptr);
    j["pixel_size_um"] = c.pixel_size_um;
    j["tile"] = {{"diameter_um", c.tile.diameter_um},
                 {"step_um", c.tile.step_um},
                 {"min_mask_fraction", c.tile.min_mask_fraction}};
    j["gray_levels"] = c.gray_levels;
    j["distance"] = c.distance;
    j["direction_mode"] = c.pooled_directions ? "pooled" : "horizontal";
    j["reduction"] = {{"method", method_name(c.method)}, {"standardize", c.standardize}, {"components", c.components}};
    j["fcm"] = {{"clusters", c.fcm.clusters},
                {"m", c.fcm.m},
                {"tol", c.fcm.tol},
                {"max_iter", c.fcm.max_iter},
                {"n_init", c.fcm.n_init}};
    j["sweep"] = {{"min", c.sweep_min}, {"max", c.sweep_max}};
    j["sampling"] = {{"per_class", c.samples_per_class}};
    j["annotations_path"] = c.annotations_path ? json(c.annotations_path->string()) : json(nullptr);
    j["seed"] = c.seed;
    j["output_dir"] = c.output_dir.string();
    return j;
}

/// Reads a JSON run configuration; absent keys keep their defaults.
inline RunConfig config_from_json(const nlohmann::json& j, RunConfig c = {}) {
    try {
        if (!j.is_object()) throw ConfigInvalid("configuration must be a JSON object");
        auto str = [&](const nlohmann::json& o, const char* k) { return o.at(k).get<std::string>(); };
        if (j.contains("image_path") && !j["image_path"].is_null()) c.image_path = str(j, "image_path");
        if (j.contains("mask_path") && !j["mask_path"].is_null()) c.mask_path = str(j, "mask_path");
        if (j.contains("pixel_size_um")) c.pixel_size_um = j["pixel_size_um"].get<double>();
        if (j.contains("tile")) {
            const auto& t = j["tile"];
            if (t.contains("diameter_um")) c.tile.diameter_um = t["diameter_um"].get<double>();
            if (t.contains("step_um")) c.tile.step_um = t["step_um"].get<double>();
            if (t.contains("min_mask_fraction")) c.tile.min_mask_fraction = t["min_mask_fraction"].get<double>();
        }
        if (j.contains("gray_levels")) c.gray_levels = j["gray_levels"].get<int>();
        if (j.contains("distance")) c.distance = j["distance"].get<int>();
        if (j.contains("direction_mode")) {
            const auto mode = j["direction_mode"].get<std::string>();
            if (mode != "pooled" && mode != "horizontal")
                throw ConfigInvalid("direction_mode must be 'pooled' or 'horizontal'");
            c.pooled_directions = mode == "pooled";
        }
        if (j.contains("reduction")) {
            const auto& r = j["reduction"];
            if (r.contains("method")) {
                const auto m = r["method"].get<std::string>();
                if (m != "svd" && m != "pca") throw ConfigInvalid("reduction.method must be 'svd' or 'pca'");
                c.method = m == "svd" ? ReductionMethod::Svd : ReductionMethod::Pca;
            }
            if (r.contains("standardize")) c.standardize = r["standardize"].get<bool>();
            if (r.contains("components")) c.components = r["components"].get<int>();
        }
        if (j.contains("fcm")) {
            const auto& f = j["fcm"];
            if (f.contains("clusters")) c.fcm.clusters = f["clusters"].get<int>();
            if (f.contains("m")) c.fcm.m = f["m"].get<double>();
            if (f.contains("tol")) c.fcm.tol = f["tol"].get<double>();
            if (f.contains("max_iter")) c.fcm.max_iter = f["max_iter"].get<int>();
            if (f.contains("n_init")) c.fcm.n_init = f["n_init"].get<int>();
        }
        if (j.contains("sweep")) {
            const auto& s = j["sweep"];
            if (s.contains("min")) c.sweep_min = s["min"].get<int>();
            if (s.contains("max")) c.sweep_max = s["max"].get<int>();
        }
        if (j.contains("sampling") && j["sampling"].contains("per_class"))
            c.samples_per_class = j["sampling"]["per_class"].get<int>();
        if (j.contains("annotations_path") && !j["annotations_path"].is_null())
            c.annotations_path = str(j, "annotations_path");
        if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("output_dir")) c.output_dir = str(j, "output_dir");
    } catch (const nlohmann::json::exception& ex) {
        throw ConfigInvalid(ex.what());
    }
    return c;
}

inline RunConfig load_config(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw ConfigInvalid("config file not found: " + path.string());
    try {
        auto cfg = config_from_json(nlohmann::json::parse(read_file_text(path)));
        cfg.validate();
        return cfg;
    } catch (const nlohmann::json::exception& ex) {
        throw ConfigInvalid(path.string() + ": " + ex.what());
    }
}

// ---------------------------------------------------------------------------

struct StageRecord {
    std::string stage;
    std::vector<std::pair<std::string, std::string>> outputs;  // relative path, sha256
    std::map<std::string, long long> counts;
    std::vector<std::string> warnings;
};

namespace detail {

inline constexpr const char* kRunManifest = "run_manifest.json";

class StageWriter {
public:
    StageWriter(const RunConfig& cfg, std::string stage) : cfg_(cfg) { record_.stage = std::move(stage); }

    void write(const std::string& rel, std::string_view data) {
        write_file_atomic(cfg_.output_dir / rel, data);
        record_.outputs.emplace_back(rel, sha256_hex(data));
    }
    void write(const std::string& rel, const std::vector<std::uint8_t>& data) {
        write(rel, std::string_view(reinterpret_cast<const char*>(data.data()), data.size()));
    }
    void count(const std::string& key, long long v) { record_.counts[key] = v; }
    void warn(std::string w) { record_.warnings.push_back(std::move(w)); }
    void warn_all(const std::vector<std::string>& ws) {
        for (const auto& w : ws) warn(w);
    }

    /// Merges this stage into run_manifest.json and returns the record.
    StageRecord finish() {
        using nlohmann::json;
        const auto path = cfg_.output_dir / kRunManifest;
        json m = json::object();
        if (std::filesystem::exists(path)) {
            try {
                m = json::parse(read_file_text(path));
            } catch (const json::exception&) {
                m = json::object();
            }
        }
        m["tool"] = "cishtex";
        m["version"] = kToolVersion;
        m["config"] = config_to_json(cfg_);
        json outputs = json::array();
        for (const auto& [file, digest] : record_.outputs) outputs.push_back({{"file", file}, {"sha256", digest}});
        m["stages"][record_.stage] = {{"outputs", outputs}, {"counts", record_.counts}, {"warnings", record_.warnings}};
        write_file_atomic(path, m.dump(2) + "\n");
        return record_;
    }

private:
    const RunConfig& cfg_;
    StageRecord record_;
};

inline std::string read_stage_input(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw StageInputMissing(path.string());
    return read_file_text(path);
}

inline RasterImage stage_image(const RunConfig& cfg) {
    cfg.require_image();
    if (!std::filesystem::exists(cfg.image_path)) throw StageInputMissing(cfg.image_path.string());
    return load_image(cfg.image_path, cfg.pixel_size_um);
}

inline TissueMask stage_mask(const RunConfig& cfg, const RasterImage& image) {
    if (cfg.mask_path && !std::filesystem::exists(*cfg.mask_path)) throw StageInputMissing(cfg.mask_path->string());
    return load_mask(cfg.mask_path, image);
}

/// Tiles for the rows of features.csv, rebuilt from their centers.
inline std::vector<Tile> tiles_from_features(const RunConfig& cfg, const TissueMask& mask,
                                             const std::vector<FeatureVector>& rows) {
    const double radius = grid_geometry(cfg.tile, cfg.pixel_size_um).radius_px;
    std::vector<Tile> tiles;
    tiles.reserve(rows.size());
    for (const auto& r : rows) tiles.push_back(Tile::circle(r.tile_id, r.cx_px, r.cy_px, radius, mask));
    return tiles;
}

}  // namespace detail

inline StageRecord cmd_extract(const RunConfig& cfg) {
    cfg.validate();
    const auto image = detail::stage_image(cfg);
    const auto mask = detail::stage_mask(cfg, image);
    const auto ex = extract_features(image, mask, cfg.tile, cfg.texture());

    detail::StageWriter w(cfg, "extract");
    w.write("features.csv", artifacts::write_features(ex.features));
    w.count("tiles", static_cast<long long>(ex.tiles.size()));
    w.count("feature_vectors", static_cast<long long>(ex.features.size()));
    w.count("excluded_tiles", static_cast<long long>(ex.excluded_tile_ids.size()));
    for (int id : ex.excluded_tile_ids) w.warn("tile " + std::to_string(id) + " excluded: NoValidPairs");
    return w.finish();
}

inline StageRecord cmd_reduce(const RunConfig& cfg) {
    cfg.validate();
    const auto rows = artifacts::read_features(detail::read_stage_input(cfg.output_dir / "features.csv"));
    const auto reduced = reduce(artifacts::to_feature_matrix(rows), cfg.method, cfg.components, cfg.standardize);

    detail::StageWriter w(cfg, "reduce");
    w.write("reduced.csv", artifacts::write_reduced_csv(reduced));
    w.write("reduced.json", artifacts::write_reduced_json(reduced));
    w.count("rows", static_cast<long long>(reduced.y.rows()));
    w.warn_all(reduced.warnings);
    return w.finish();
}

inline StageRecord cmd_cluster(const RunConfig& cfg) {
    cfg.validate();
    const auto pts = artifacts::read_reduced_csv(detail::read_stage_input(cfg.output_dir / "reduced.csv"));
    const auto fcm_cfg = cfg.fcm_config();
    const auto part = canonicalize(fcm(pts.points, fcm_cfg));
    const auto labels = hard_assign(part);

    detail::StageWriter w(cfg, "cluster");
    w.write("clusters.csv", artifacts::write_clusters_csv(pts.tile_ids, labels, part.u));
    w.write("clusters.json", artifacts::write_clusters_json(part, fcm_cfg));
    w.count("rows", static_cast<long long>(labels.size()));
    w.count("iterations", part.iterations);
    if (!part.converged) w.warn("fcm did not converge within max_iter");
    return w.finish();
}

inline StageRecord cmd_sweep(const RunConfig& cfg) {
    cfg.validate();
    const auto pts = artifacts::read_reduced_csv(detail::read_stage_input(cfg.output_dir / "reduced.csv"));
    const auto sweep = sweep_clusters(pts.points, cfg.fcm_config(), cfg.sweep_min, cfg.sweep_max);

    detail::StageWriter w(cfg, "sweep");
    w.write("fpc.csv", artifacts::write_fpc_csv(sweep));
    w.write("fpc_curve.csv", render_fpc_curve(sweep));
    w.count("rows", static_cast<long long>(sweep.size()));
    return w.finish();
}

inline StageRecord cmd_render(const RunConfig& cfg) {
    cfg.validate();
    const auto image = detail::stage_image(cfg);
    const auto mask = detail::stage_mask(cfg, image);
    const auto rows = artifacts::read_features(detail::read_stage_input(cfg.output_dir / "features.csv"));
    const auto clusters = artifacts::read_clusters_csv(detail::read_stage_input(cfg.output_dir / "clusters.csv"));
    const auto label_of = clusters.label_map();

    std::vector<FeatureVector> labelled;
    std::vector<int> labels;
    for (const auto& r : rows) {
        const auto it = label_of.find(r.tile_id);
        if (it == label_of.end()) throw UnknownTile("tile " + std::to_string(r.tile_id) + " has no cluster label");
        labelled.push_back(r);
        labels.push_back(it->second);
    }
    const auto tiles = detail::tiles_from_features(cfg, mask, labelled);
    const int classes = static_cast<int>(clusters.u.cols());

    detail::StageWriter w(cfg, "render");
    w.write("class_map.png", encode_png(render_class_map(image, tiles, labels)));
    w.write("legend.png", encode_png(render_legend(std::max(classes, 1))));
    w.count("tiles", static_cast<long long>(tiles.size()));
    return w.finish();
}

inline StageRecord cmd_sample(const RunConfig& cfg) {
    cfg.validate();
    const auto image = detail::stage_image(cfg);
    const auto mask = detail::stage_mask(cfg, image);
    const auto rows = artifacts::read_features(detail::read_stage_input(cfg.output_dir / "features.csv"));
    const auto clusters = artifacts::read_clusters_csv(detail::read_stage_input(cfg.output_dir / "clusters.csv"));
    const auto label_of = clusters.label_map();
    const auto tiles = detail::tiles_from_features(cfg, mask, rows);

    std::vector<SampleCandidate> candidates;
    for (const auto& t : tiles) {
        const auto it = label_of.find(t.id());
        if (it != label_of.end()) candidates.push_back({t.id(), it->second, t.box()});
    }
    const auto manifest = sample_tiles(candidates, cfg.samples_per_class, stage_seed(cfg.seed, "sample"));

    detail::StageWriter w(cfg, "sample");
    for (const auto& e : manifest.entries) {
        RasterImage crop(e.bbox.width(), e.bbox.height(), image.pixel_size_um());
        for (int y = 0; y < e.bbox.height(); ++y)
            for (int x = 0; x < e.bbox.width(); ++x) crop.at(x, y) = image.at(e.bbox.x0 + x, e.bbox.y0 + y);
        w.write(artifacts::tile_crop_name(e.tile_id), encode_png(crop));
    }
    w.write("manifest.json", artifacts::write_sample_manifest(manifest));
    w.count("sampled_tiles", static_cast<long long>(manifest.entries.size()));
    w.warn_all(manifest.warnings);
    return w.finish();
}

inline StageRecord cmd_aggregate(const RunConfig& cfg) {
    cfg.validate();
    if (!cfg.annotations_path) throw ConfigInvalid("annotations_path is required for aggregate");
    const auto records = artifacts::read_annotations(detail::read_stage_input(*cfg.annotations_path),
                                                     cfg.annotations_path->string());
    const auto manifest = artifacts::read_sample_manifest(detail::read_stage_input(cfg.output_dir / "manifest.json"));
    const auto clusters = artifacts::read_clusters_csv(detail::read_stage_input(cfg.output_dir / "clusters.csv"));

    std::set<int> known;
    for (const auto& e : manifest.entries) known.insert(e.tile_id);
    const auto grades = aggregate(records, known);

    std::vector<std::string> warnings;
    std::set<int> graded;
    for (const auto& g : grades) graded.insert(g.tile_id);
    for (int id : known)
        if (!graded.contains(id)) warnings.push_back("tile " + std::to_string(id) + " has no annotation");

    const bool has_class_rows =
        std::any_of(records.begin(), records.end(), [](const auto& r) { return r.is_class_level(); });
    std::optional<EvaluationReport> report;
    if (has_class_rows) {
        const auto classes = grade_classes(records, static_cast<int>(clusters.u.cols()));
        report = confusion(grades, classes, clusters.label_map());
    }

    detail::StageWriter w(cfg, "aggregate");
    w.write("report.json", artifacts::write_report(grades, report ? &*report : nullptr, warnings));
    w.count("annotated_tiles", static_cast<long long>(grades.size()));
    w.count("records", static_cast<long long>(records.size()));
    w.warn_all(warnings);
    return w.finish();
}

/// extract -> reduce -> cluster -> render -> sample
inline std::vector<StageRecord> cmd_pipeline(const RunConfig& cfg) {
    cfg.validate();
    cfg.require_image();
    std::vector<StageRecord> out;
    out.push_back(cmd_extract(cfg));
    out.push_back(cmd_reduce(cfg));
    out.push_back(cmd_cluster(cfg));
    out.push_back(cmd_render(cfg));
    out.push_back(cmd_sample(cfg));
    return out;
}

}  // namespace cishtex
