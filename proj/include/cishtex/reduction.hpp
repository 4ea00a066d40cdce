#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "cishtex/error.hpp"
#include "cishtex/linalg.hpp"

namespace cishtex {

/// N x D feature matrix with the tile id of every row.
struct FeatureMatrix {
    std::vector<int> tile_ids;
    Matrix x;
};

enum class ReductionMethod { Svd, Pca };

inline const char* method_name(ReductionMethod m) { return m == ReductionMethod::Svd ? "svd" : "pca"; }

struct ReducedMatrix {
    std::vector<int> tile_ids;
    Matrix y;  // N x k
    ReductionMethod method = ReductionMethod::Svd;
    bool standardized = false;
    std::vector<double> singular_values;     // SVD: all, nonincreasing
    std::vector<double> eigenvalues;         // PCA: covariance spectrum, nonincreasing
    std::vector<double> explained_variance;  // PCA: fraction per kept component
    Matrix loadings;                         // k x D
    std::vector<int> zero_variance_columns;  // PCA only
    std::vector<std::string> warnings;
};

namespace detail {

inline void check_feature_matrix(const FeatureMatrix& fm, int k) {
    if (fm.x.rows() < 2) throw InvalidInput("reduction needs at least 2 rows");
    if (fm.tile_ids.size() != fm.x.rows()) throw DimensionMismatch("tile ids do not match rows");
    if (k < 1 || static_cast<std::size_t>(k) > fm.x.cols())
        throw InvalidInput("component count must lie in [1, feature count]");
    for (double v : fm.x.data())
        if (!std::isfinite(v)) throw InvalidInput("feature matrix has non-finite entries");
}

/// Flip component `k` of (loadings, scores) so the loading entry with the
/// largest magnitude is positive; the lowest index wins ties.
inline void apply_sign_convention(Matrix& v, Matrix& scores, std::size_t k) {
    std::size_t best = 0;
    double best_abs = -1.0;
    for (std::size_t i = 0; i < v.rows(); ++i) {
        const double a = std::abs(v(i, k));
        if (a > best_abs) {
            best_abs = a;
            best = i;
        }
    }
    if (v(best, k) >= 0.0) return;
    for (std::size_t i = 0; i < v.rows(); ++i) v(i, k) = -v(i, k);
    for (std::size_t i = 0; i < scores.rows(); ++i) scores(i, k) = -scores(i, k);
}

inline Matrix transpose_leading(const Matrix& v, std::size_t k) {
    Matrix out(k, v.rows());
    for (std::size_t c = 0; c < k; ++c)
        for (std::size_t r = 0; r < v.rows(); ++r) out(c, r) = v(r, c);
    return out;
}

}  // namespace detail

/// Truncated SVD of the raw (uncentered) matrix; scores are U_k * Sigma_k.
inline ReducedMatrix svd_reduce(const FeatureMatrix& fm, int k = 2) {
    detail::check_feature_matrix(fm, k);
    auto svd = jacobi_svd(fm.x);
    const std::size_t n = fm.x.rows();

    ReducedMatrix out;
    out.tile_ids = fm.tile_ids;
    out.method = ReductionMethod::Svd;
    out.singular_values = svd.singular_values;
    for (std::size_t c = 0; c < static_cast<std::size_t>(k); ++c) {
        detail::apply_sign_convention(svd.v, svd.scores, c);
    }
    out.y = Matrix(n, k);
    for (std::size_t i = 0; i < n; ++i)
        for (int c = 0; c < k; ++c) out.y(i, c) = svd.scores(i, c);
    out.loadings = detail::transpose_leading(svd.v, k);
    return out;
}

/// PCA on centered (and by default standardized) columns. Zero-variance
/// columns stay all-zero after centering and are listed in the result.
inline ReducedMatrix pca_reduce(const FeatureMatrix& fm, int k = 2, bool standardize = true) {
    detail::check_feature_matrix(fm, k);
    const std::size_t n = fm.x.rows(), d = fm.x.cols();

    ReducedMatrix out;
    out.tile_ids = fm.tile_ids;
    out.method = ReductionMethod::Pca;
    out.standardized = standardize;

    Matrix xc = fm.x;
    for (std::size_t c = 0; c < d; ++c) {
        double mn = xc(0, c), mx = xc(0, c), mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            mn = std::min(mn, xc(i, c));
            mx = std::max(mx, xc(i, c));
            mean += xc(i, c);
        }
        if (mn == mx) {
            for (std::size_t i = 0; i < n; ++i) xc(i, c) = 0.0;
            out.zero_variance_columns.push_back(static_cast<int>(c));
            continue;
        }
        mean /= static_cast<double>(n);
        double ss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            xc(i, c) -= mean;
            ss += xc(i, c) * xc(i, c);
        }
        if (standardize) {
            const double sd = std::sqrt(ss / static_cast<double>(n - 1));
            for (std::size_t i = 0; i < n; ++i) xc(i, c) /= sd;
        }
    }
    if (!out.zero_variance_columns.empty())
        out.warnings.push_back(std::to_string(out.zero_variance_columns.size()) +
                               " zero-variance feature column(s) left centered");

    Matrix cov(d, d);
    for (std::size_t a = 0; a < d; ++a) {
        for (std::size_t b = a; b < d; ++b) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) s += xc(i, a) * xc(i, b);
            cov(a, b) = cov(b, a) = s / static_cast<double>(n - 1);
        }
    }
    auto eig = jacobi_eigen_symmetric(cov);

    Matrix scores(n, k);
    for (std::size_t i = 0; i < n; ++i)
        for (int c = 0; c < k; ++c) {
            double s = 0.0;
            for (std::size_t j = 0; j < d; ++j) s += xc(i, j) * eig.vectors(j, c);
            scores(i, c) = s;
        }
    for (int c = 0; c < k; ++c) detail::apply_sign_convention(eig.vectors, scores, c);

    double total = 0.0;
    for (double ev : eig.values) total += std::max(ev, 0.0);
    out.eigenvalues = eig.values;
    out.explained_variance.assign(k, 0.0);
    if (total > 0.0) {
        for (int c = 0; c < k; ++c) out.explained_variance[c] = std::max(eig.values[c], 0.0) / total;
    } else {
        out.warnings.push_back("total variance is zero; explained variance undefined (reported as 0)");
    }
    out.y = std::move(scores);
    out.loadings = detail::transpose_leading(eig.vectors, k);
    return out;
}

inline ReducedMatrix reduce(const FeatureMatrix& fm, ReductionMethod method, int k = 2,
                            bool standardize = true) {
    return method == ReductionMethod::Svd ? svd_reduce(fm, k) : pca_reduce(fm, k, standardize);
}

}  // namespace cishtex
