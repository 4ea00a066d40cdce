#pragma once

// Text serialization of every file exchanged between pipeline stages.

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "cishtex/clustering.hpp"
#include "cishtex/csv.hpp"
#include "cishtex/evaluation.hpp"
#include "cishtex/reduction.hpp"
#include "cishtex/texture.hpp"

namespace cishtex::artifacts {

using nlohmann::json;

// --- features.csv ----------------------------------------------------------

inline std::string write_features(const std::vector<FeatureVector>& rows) {
    std::vector<std::string> header = {"tile_id", "cx_px", "cy_px"};
    for (auto& n : feature_column_names()) header.push_back(n);
    std::string out = csv::join(header) + "\n";
    for (const auto& fv : rows) {
        out += std::to_string(fv.tile_id) + "," + std::to_string(fv.cx_px) + "," + std::to_string(fv.cy_px);
        for (double v : fv.values) out += "," + csv::format_double(v);
        out += "\n";
    }
    return out;
}

inline std::vector<FeatureVector> read_features(const std::string& text, const std::string& source = "features.csv") {
    const auto t = csv::parse(text, source);
    const int id = t.require_column("tile_id", source);
    const int cx = t.require_column("cx_px", source);
    const int cy = t.require_column("cy_px", source);
    std::vector<int> cols;
    for (const auto& n : feature_column_names()) cols.push_back(t.require_column(n, source));
    std::vector<FeatureVector> out;
    for (const auto& r : t.rows) {
        FeatureVector fv;
        fv.tile_id = static_cast<int>(csv::to_int(r[id], source));
        fv.cx_px = static_cast<int>(csv::to_int(r[cx], source));
        fv.cy_px = static_cast<int>(csv::to_int(r[cy], source));
        for (std::size_t k = 0; k < cols.size(); ++k) fv.values[k] = csv::to_double(r[cols[k]], source);
        out.push_back(fv);
    }
    return out;
}

inline FeatureMatrix to_feature_matrix(const std::vector<FeatureVector>& rows) {
    FeatureMatrix fm;
    fm.x = Matrix(rows.size(), kFeatureCount);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        fm.tile_ids.push_back(rows[i].tile_id);
        for (int k = 0; k < kFeatureCount; ++k) fm.x(i, k) = rows[i].values[k];
    }
    return fm;
}

// --- reduced.csv + reduced.json --------------------------------------------

inline std::string write_reduced_csv(const ReducedMatrix& r) {
    std::string out = "tile_id";
    for (std::size_t c = 0; c < r.y.cols(); ++c) out += ",c" + std::to_string(c + 1);
    out += "\n";
    for (std::size_t i = 0; i < r.y.rows(); ++i) {
        out += std::to_string(r.tile_ids[i]);
        for (std::size_t c = 0; c < r.y.cols(); ++c) out += "," + csv::format_double(r.y(i, c));
        out += "\n";
    }
    return out;
}

inline json matrix_json(const Matrix& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        auto r = m.row(i);
        rows.push_back(std::vector<double>(r.begin(), r.end()));
    }
    return rows;
}

inline std::string write_reduced_json(const ReducedMatrix& r) {
    json j;
    j["method"] = method_name(r.method);
    j["components"] = r.y.cols();
    j["standardized"] = r.standardized;
    j["feature_columns"] = feature_column_names();
    j["loadings"] = matrix_json(r.loadings);
    if (r.method == ReductionMethod::Svd) {
        j["singular_values"] = r.singular_values;
        j["centered"] = false;
    } else {
        j["centered"] = true;
        j["eigenvalues"] = r.eigenvalues;
        j["explained_variance"] = r.explained_variance;
        j["zero_variance_columns"] = r.zero_variance_columns;
    }
    j["warnings"] = r.warnings;
    return j.dump(2) + "\n";
}

struct PointTable {
    std::vector<int> tile_ids;
    Matrix points;
};

inline PointTable read_reduced_csv(const std::string& text, const std::string& source = "reduced.csv") {
    const auto t = csv::parse(text, source);
    const int id = t.require_column("tile_id", source);
    std::vector<int> cols;
    for (int c = 1;; ++c) {
        const int col = t.column("c" + std::to_string(c));
        if (col < 0) break;
        cols.push_back(col);
    }
    if (cols.empty()) throw InvalidInput(source + ": no component columns");
    PointTable out;
    out.points = Matrix(t.rows.size(), cols.size());
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        out.tile_ids.push_back(static_cast<int>(csv::to_int(t.rows[i][id], source)));
        for (std::size_t c = 0; c < cols.size(); ++c) out.points(i, c) = csv::to_double(t.rows[i][cols[c]], source);
    }
    return out;
}

// --- clusters.csv + clusters.json ------------------------------------------

inline std::string write_clusters_csv(const std::vector<int>& tile_ids, const std::vector<int>& labels,
                                      const Matrix& u) {
    std::string out = "tile_id,label";
    for (std::size_t k = 0; k < u.cols(); ++k) out += ",u_" + std::to_string(k);
    out += "\n";
    for (std::size_t i = 0; i < u.rows(); ++i) {
        out += std::to_string(tile_ids[i]) + "," + std::to_string(labels[i]);
        for (std::size_t k = 0; k < u.cols(); ++k) out += "," + csv::format_double(u(i, k));
        out += "\n";
    }
    return out;
}

struct ClusterTable {
    std::vector<int> tile_ids;
    std::vector<int> labels;
    Matrix u;

    std::map<int, int> label_map() const {
        std::map<int, int> m;
        for (std::size_t i = 0; i < tile_ids.size(); ++i) m[tile_ids[i]] = labels[i];
        return m;
    }
};

inline ClusterTable read_clusters_csv(const std::string& text, const std::string& source = "clusters.csv") {
    const auto t = csv::parse(text, source);
    const int id = t.require_column("tile_id", source);
    const int lab = t.require_column("label", source);
    std::vector<int> cols;
    for (int k = 0;; ++k) {
        const int col = t.column("u_" + std::to_string(k));
        if (col < 0) break;
        cols.push_back(col);
    }
    ClusterTable out;
    out.u = Matrix(t.rows.size(), cols.size());
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        out.tile_ids.push_back(static_cast<int>(csv::to_int(t.rows[i][id], source)));
        out.labels.push_back(static_cast<int>(csv::to_int(t.rows[i][lab], source)));
        for (std::size_t k = 0; k < cols.size(); ++k) out.u(i, k) = csv::to_double(t.rows[i][cols[k]], source);
    }
    return out;
}

inline std::string write_clusters_json(const FuzzyPartition& p, const FcmConfig& cfg) {
    json j;
    j["clusters"] = cfg.clusters;
    j["m"] = cfg.m;
    j["tol"] = cfg.tol;
    j["max_iter"] = cfg.max_iter;
    j["n_init"] = cfg.n_init;
    j["seed"] = cfg.seed;
    j["centroids"] = matrix_json(p.centroids);
    j["objective"] = p.objective;
    j["fpc"] = p.fpc;
    j["iterations"] = p.iterations;
    j["converged"] = p.converged;
    j["winning_restart"] = p.restart;
    return j.dump(2) + "\n";
}

// --- fpc.csv ---------------------------------------------------------------

inline std::string write_fpc_csv(const std::vector<SweepEntry>& sweep) {
    std::string out = "c,fpc,objective,iterations,converged\n";
    for (const auto& e : sweep)
        out += std::to_string(e.clusters) + "," + csv::format_double(e.fpc) + "," +
               csv::format_double(e.objective) + "," + std::to_string(e.iterations) + "," +
               (e.converged ? "1" : "0") + "\n";
    return out;
}

inline std::vector<SweepEntry> read_fpc_csv(const std::string& text, const std::string& source = "fpc.csv") {
    const auto t = csv::parse(text, source);
    const int c = t.require_column("c", source), f = t.require_column("fpc", source),
              o = t.require_column("objective", source), it = t.require_column("iterations", source),
              cv = t.require_column("converged", source);
    std::vector<SweepEntry> out;
    for (const auto& r : t.rows)
        out.push_back({static_cast<int>(csv::to_int(r[c], source)), csv::to_double(r[f], source),
                       csv::to_double(r[o], source), static_cast<int>(csv::to_int(r[it], source)),
                       csv::to_int(r[cv], source) != 0});
    return out;
}

// --- annotations.csv -------------------------------------------------------

inline std::string write_annotations(const std::vector<AnnotationRecord>& records, bool with_class_id) {
    std::string out = with_class_id ? "evaluator_id,weight,tile_id,strength,pattern,class_id\n"
                                    : "evaluator_id,weight,tile_id,strength,pattern\n";
    for (const auto& r : records) {
        out += r.evaluator_id + "," + csv::format_double(r.weight) + "," + std::to_string(r.tile_id) + "," +
               std::to_string(r.strength) + "," + std::to_string(r.pattern);
        if (with_class_id) out += "," + std::to_string(r.class_id);
        out += "\n";
    }
    return out;
}

/// Accepts the five-column tile schema, optionally extended with class_id for
/// class-level rows (tile_id = -1).
inline std::vector<AnnotationRecord> read_annotations(const std::string& text,
                                                      const std::string& source = "annotations.csv") {
    const auto t = csv::parse(text, source);
    const int ev = t.require_column("evaluator_id", source), w = t.require_column("weight", source),
              tid = t.require_column("tile_id", source), st = t.require_column("strength", source),
              pa = t.require_column("pattern", source);
    const int cls = t.column("class_id");
    std::vector<AnnotationRecord> out;
    for (const auto& r : t.rows) {
        AnnotationRecord a;
        a.evaluator_id = r[ev];
        a.weight = csv::to_double(r[w], source);
        a.tile_id = static_cast<int>(csv::to_int(r[tid], source));
        a.strength = static_cast<int>(csv::to_int(r[st], source));
        a.pattern = static_cast<int>(csv::to_int(r[pa], source));
        if (cls >= 0 && !r[cls].empty()) a.class_id = static_cast<int>(csv::to_int(r[cls], source));
        if (a.tile_id < 0 && a.class_id < 0)
            throw InvalidInput(source + ": class-level row without class_id");
        out.push_back(std::move(a));
    }
    return out;
}

// --- manifest.json (sampling) ----------------------------------------------

inline json scheme_json() {
    return {{"strength", GradingScheme::kStrengthNames}, {"pattern", GradingScheme::kPatternNames}};
}

inline std::string tile_crop_name(int tile_id) { return "tiles/tile_" + std::to_string(tile_id) + ".png"; }

inline std::string write_sample_manifest(const SampleManifest& m) {
    json tiles = json::array();
    for (const auto& e : m.entries)
        tiles.push_back({{"tile_id", e.tile_id},
                         {"image_path", tile_crop_name(e.tile_id)},
                         {"bbox", {{"x", e.bbox.x0}, {"y", e.bbox.y0}, {"width", e.bbox.width()}, {"height", e.bbox.height()}}},
                         {"hidden_class", e.hidden_class},
                         {"order", e.order}});
    json j;
    j["scheme"] = scheme_json();
    j["tiles"] = tiles;
    j["warnings"] = m.warnings;
    return j.dump(2) + "\n";
}

inline SampleManifest read_sample_manifest(const std::string& text, const std::string& source = "manifest.json") {
    SampleManifest m;
    try {
        const auto j = json::parse(text);
        for (const auto& t : j.at("tiles")) {
            ManifestEntry e;
            e.tile_id = t.at("tile_id").get<int>();
            const auto& b = t.at("bbox");
            e.bbox = {b.at("x").get<int>(), b.at("y").get<int>(), b.at("x").get<int>() + b.at("width").get<int>(),
                      b.at("y").get<int>() + b.at("height").get<int>()};
            e.hidden_class = t.at("hidden_class").get<int>();
            e.order = t.at("order").get<int>();
            m.entries.push_back(e);
        }
        if (j.contains("warnings")) m.warnings = j.at("warnings").get<std::vector<std::string>>();
    } catch (const json::exception& ex) {
        throw InvalidInput(source + ": " + ex.what());
    }
    return m;
}

// --- report.json -----------------------------------------------------------

template <std::size_t N>
json axis_json(const AxisConfusion<N>& a) {
    json rows = json::array();
    for (const auto& r : a.matrix) rows.push_back(std::vector<int>(r.begin(), r.end()));
    return {{"matrix", rows},
            {"total", a.total},
            {"accuracy", a.accuracy()},
            {"adjacent_accuracy", a.adjacent_accuracy()}};
}

inline json tile_grades_json(const std::vector<TileGrade>& grades) {
    json rows = json::array();
    for (const auto& g : grades)
        rows.push_back({{"tile_id", g.tile_id},
                        {"strength_mean", g.grade.strength_mean},
                        {"pattern_mean", g.grade.pattern_mean},
                        {"strength", g.grade.strength},
                        {"pattern", g.grade.pattern},
                        {"coverage", g.grade.coverage}});
    return rows;
}

inline std::string write_report(const std::vector<TileGrade>& grades, const EvaluationReport* report,
                                const std::vector<std::string>& warnings) {
    json j;
    j["tiles"] = tile_grades_json(grades);
    if (report) {
        json classes = json::array();
        for (const auto& c : report->classes)
            classes.push_back({{"class_id", c.class_id},
                               {"strength", c.strength},
                               {"pattern", c.pattern},
                               {"strength_mean", c.detail.strength_mean},
                               {"pattern_mean", c.detail.pattern_mean},
                               {"coverage", c.detail.coverage}});
        j["classes"] = classes;
        j["confusion"] = {{"strength", axis_json(report->strength)}, {"pattern", axis_json(report->pattern)}};
        json rows = json::array();
        for (const auto& t : report->tiles)
            rows.push_back({{"tile_id", t.tile_id},
                            {"label", t.label},
                            {"expert_strength", t.expert.strength},
                            {"expert_pattern", t.expert.pattern},
                            {"class_strength", t.class_strength},
                            {"class_pattern", t.class_pattern},
                            {"coverage", t.expert.coverage}});
        j["comparison"] = rows;
    } else {
        j["classes"] = nullptr;
        j["confusion"] = nullptr;
    }
    j["warnings"] = warnings;
    return j.dump(2) + "\n";
}

}  // namespace cishtex::artifacts
