#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "cishtex/error.hpp"
#include "cishtex/linalg.hpp"
#include "cishtex/random.hpp"

namespace cishtex {

struct FcmConfig {
    int clusters = 7;
    double m = 2.0;  // fuzziness exponent
    double tol = 1e-6;
    int max_iter = 1000;
    int n_init = 10;
    std::uint64_t seed = 0;

    void validate(std::size_t n_points) const {
        if (clusters < 2) throw InvalidInput("cluster count must be >= 2");
        if (!(m > 1.0)) throw InvalidInput("fuzziness exponent must be > 1");
        if (!(tol > 0.0)) throw InvalidInput("tolerance must be positive");
        if (max_iter < 1) throw InvalidInput("max_iter must be >= 1");
        if (n_init < 1) throw InvalidInput("n_init must be >= 1");
        if (n_points < static_cast<std::size_t>(clusters))
            throw TooFewPoints(std::to_string(n_points) + " points for " + std::to_string(clusters) +
                               " clusters");
    }
};

struct FuzzyPartition {
    Matrix u;          // N x c memberships
    Matrix centroids;  // c x dim
    double objective = 0.0;
    double fpc = 0.0;
    int iterations = 0;
    bool converged = false;
    int restart = 0;  // index of the winning restart
};

/// Per-iteration observation of a single optimization run.
struct FcmIteration {
    int iteration = 0;
    double objective = 0.0;
    const Matrix& u;
};

using FcmObserver = std::function<void(const FcmIteration&)>;

/// Fuzzy partition coefficient: mean over points of the summed squared memberships.
inline double fpc(const Matrix& u) {
    if (u.rows() == 0) return 0.0;
    double s = 0.0;
    for (double v : u.data()) s += v * v;
    return s / static_cast<double>(u.rows());
}

namespace detail {

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

class FcmRun {
public:
    FcmRun(const Matrix& points, const FcmConfig& cfg)
        : y_(points), cfg_(cfg), n_(points.rows()), c_(static_cast<std::size_t>(cfg.clusters)),
          dim_(points.cols()) {
        double scale = 1.0;
        for (double v : points.data()) scale = std::max(scale, std::abs(v));
        coincide2_ = (1e-12 * scale) * (1e-12 * scale);
    }

    FuzzyPartition run(std::uint64_t seed, const FcmObserver& observer) const {
        std::mt19937_64 rng(seed);
        Matrix u(n_, c_);
        for (std::size_t i = 0; i < n_; ++i) {
            double s = 0.0;
            for (std::size_t k = 0; k < c_; ++k) s += (u(i, k) = uniform01(rng) + 1e-12);
            for (std::size_t k = 0; k < c_; ++k) u(i, k) /= s;
        }

        FuzzyPartition part;
        Matrix v(c_, dim_);
        std::vector<std::uint8_t> has_prev(c_, 0);
        for (int it = 1; it <= cfg_.max_iter; ++it) {
            update_centroids(u, v, has_prev);
            Matrix next = memberships(v);
            double delta = 0.0;
            for (std::size_t k = 0; k < next.data().size(); ++k)
                delta = std::max(delta, std::abs(next.data()[k] - u.data()[k]));
            u = std::move(next);
            part.iterations = it;
            part.objective = objective(u, v);
            if (observer) observer(FcmIteration{it, part.objective, u});
            if (delta < cfg_.tol) {
                part.converged = true;
                break;
            }
        }
        part.fpc = fpc(u);
        part.u = std::move(u);
        part.centroids = std::move(v);
        return part;
    }

    double objective(const Matrix& u, const Matrix& v) const {
        double j = 0.0;
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t k = 0; k < c_; ++k)
                j += std::pow(u(i, k), cfg_.m) * squared_distance(y_.row(i), v.row(k));
        return j;
    }

private:
    void update_centroids(const Matrix& u, Matrix& v, std::vector<std::uint8_t>& has_prev) const {
        for (std::size_t k = 0; k < c_; ++k) {
            double wsum = 0.0;
            std::vector<double> acc(dim_, 0.0);
            for (std::size_t i = 0; i < n_; ++i) {
                const double w = std::pow(u(i, k), cfg_.m);
                wsum += w;
                for (std::size_t d = 0; d < dim_; ++d) acc[d] += w * y_(i, d);
            }
            if (wsum > 0.0) {
                for (std::size_t d = 0; d < dim_; ++d) v(k, d) = acc[d] / wsum;
                has_prev[k] = 1;
            } else if (!has_prev[k]) {
                // A cluster nobody belongs to keeps its position; with no
                // history it starts at the data mean.
                for (std::size_t d = 0; d < dim_; ++d) {
                    double mean = 0.0;
                    for (std::size_t i = 0; i < n_; ++i) mean += y_(i, d);
                    v(k, d) = mean / static_cast<double>(n_);
                }
                has_prev[k] = 1;
            }
        }
    }

    Matrix memberships(const Matrix& v) const {
        Matrix u(n_, c_);
        const double expo = 1.0 / (cfg_.m - 1.0);
        std::vector<double> d2(c_);
        for (std::size_t i = 0; i < n_; ++i) {
            std::size_t coincident = 0;
            double dmin = INFINITY;
            for (std::size_t k = 0; k < c_; ++k) {
                d2[k] = squared_distance(y_.row(i), v.row(k));
                if (d2[k] <= coincide2_) ++coincident;
                dmin = std::min(dmin, d2[k]);
            }
            if (coincident > 0) {
                const double share = 1.0 / static_cast<double>(coincident);
                for (std::size_t k = 0; k < c_; ++k) u(i, k) = d2[k] <= coincide2_ ? share : 0.0;
                continue;
            }
            // u_ik = 1 / sum_j (d2_k / d2_j)^(1/(m-1)), evaluated relative to
            // the nearest centroid to stay in range.
            double s = 0.0;
            for (std::size_t k = 0; k < c_; ++k) s += (u(i, k) = std::pow(dmin / d2[k], expo));
            for (std::size_t k = 0; k < c_; ++k) u(i, k) /= s;
        }
        return u;
    }

    const Matrix& y_;
    FcmConfig cfg_;
    std::size_t n_, c_, dim_;
    double coincide2_ = 0.0;
};

}  // namespace detail

/// Seed of restart `r` for a given config.
inline std::uint64_t fcm_restart_seed(const FcmConfig& cfg, int restart) {
    return mix_seed(cfg.seed, static_cast<std::uint64_t>(cfg.clusters), static_cast<std::uint64_t>(restart));
}

/// Fuzzy c-means by alternating optimization with `n_init` seeded restarts;
/// the restart with the lowest objective wins (earliest on ties).
///
/// A point whose distance to one or more centroids is below 1e-12 x data
/// scale splits its membership equally over those centroids.
inline FuzzyPartition fcm(const Matrix& points, const FcmConfig& cfg, const FcmObserver& observer = {}) {
    cfg.validate(points.rows());
    detail::FcmRun runner(points, cfg);
    FuzzyPartition best;
    for (int r = 0; r < cfg.n_init; ++r) {
        auto part = runner.run(fcm_restart_seed(cfg, r), observer);
        part.restart = r;
        if (r == 0 || part.objective < best.objective) best = std::move(part);
    }
    return best;
}

/// Permutation (new index -> old index) sorting centroids lexicographically.
inline std::vector<std::size_t> canonical_order(const Matrix& centroids) {
    std::vector<std::size_t> order(centroids.rows());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto ra = centroids.row(a), rb = centroids.row(b);
        return std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end());
    });
    return order;
}

/// Reorders clusters by ascending first reduced component, then the second.
inline FuzzyPartition canonicalize(const FuzzyPartition& part) {
    const auto order = canonical_order(part.centroids);
    FuzzyPartition out = part;
    for (std::size_t k = 0; k < order.size(); ++k) {
        for (std::size_t d = 0; d < part.centroids.cols(); ++d)
            out.centroids(k, d) = part.centroids(order[k], d);
        for (std::size_t i = 0; i < part.u.rows(); ++i) out.u(i, k) = part.u(i, order[k]);
    }
    return out;
}

/// Argmax membership per row; the lowest cluster index wins ties.
inline std::vector<int> hard_assign(const FuzzyPartition& part) {
    std::vector<int> labels(part.u.rows(), 0);
    for (std::size_t i = 0; i < part.u.rows(); ++i) {
        const auto row = part.u.row(i);
        labels[i] = static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
    }
    return labels;
}

struct SweepEntry {
    int clusters = 0;
    double fpc = 0.0;
    double objective = 0.0;
    int iterations = 0;
    bool converged = false;
};

inline std::vector<SweepEntry> sweep_clusters(const Matrix& points, const FcmConfig& cfg, int c_min = 2,
                                              int c_max = 10) {
    if (c_min < 2 || c_max < c_min) throw InvalidInput("cluster range must satisfy 2 <= min <= max");
    if (points.rows() < static_cast<std::size_t>(c_max))
        throw TooFewPoints(std::to_string(points.rows()) + " points for up to " + std::to_string(c_max) +
                           " clusters");
    std::vector<SweepEntry> out;
    for (int c = c_min; c <= c_max; ++c) {
        FcmConfig per_c = cfg;
        per_c.clusters = c;
        const auto part = fcm(points, per_c);
        out.push_back({c, part.fpc, part.objective, part.iterations, part.converged});
    }
    return out;
}

}  // namespace cishtex
