#pragma once

// Reference Haralick statistics written as literal double summations over
// (i, j), sharing no code with the library. Slow on purpose.

#include <array>
#include <cmath>

#include "cishtex/texture.hpp"

namespace cishtex::testing {

inline std::array<double, 13> oracle_haralick(const Glcm& g) {
    const int G = g.gray_levels;
    auto p = [&](int i, int j) { return g(i, j); };
    auto plogp = [](double v) { return v > 0.0 ? v * std::log(v) : 0.0; };
    auto px = [&](int i) {
        double s = 0.0;
        for (int j = 0; j < G; ++j) s += p(i, j);
        return s;
    };
    auto py = [&](int j) {
        double s = 0.0;
        for (int i = 0; i < G; ++i) s += p(i, j);
        return s;
    };
    auto psum = [&](int k) {
        double s = 0.0;
        for (int i = 0; i < G; ++i)
            for (int j = 0; j < G; ++j)
                if (i + j == k) s += p(i, j);
        return s;
    };
    auto pdiff = [&](int k) {
        double s = 0.0;
        for (int i = 0; i < G; ++i)
            for (int j = 0; j < G; ++j)
                if (std::abs(i - j) == k) s += p(i, j);
        return s;
    };

    std::array<double, 13> f{};
    std::vector<double> vx(G), vy(G), vs(2 * G - 1), vd(G);
    for (int i = 0; i < G; ++i) {
        vx[i] = px(i);
        vy[i] = py(i);
        vd[i] = pdiff(i);
    }
    for (int k = 0; k < 2 * G - 1; ++k) vs[k] = psum(k);

    double mux = 0.0, muy = 0.0;
    for (int i = 0; i < G; ++i) {
        mux += i * vx[i];
        muy += i * vy[i];
    }
    double sx2 = 0.0, sy2 = 0.0;
    for (int i = 0; i < G; ++i) {
        sx2 += (i - mux) * (i - mux) * vx[i];
        sy2 += (i - muy) * (i - muy) * vy[i];
    }

    for (int i = 0; i < G; ++i)
        for (int j = 0; j < G; ++j) f[0] += p(i, j) * p(i, j);
    for (int i = 0; i < G; ++i)
        for (int j = 0; j < G; ++j) f[1] += (i - j) * (i - j) * p(i, j);
    {
        double num = 0.0;
        for (int i = 0; i < G; ++i)
            for (int j = 0; j < G; ++j) num += (i - mux) * (j - muy) * p(i, j);
        const double den = std::sqrt(sx2 * sy2);
        f[2] = den > 0.0 ? num / den : 0.0;
    }
    for (int i = 0; i < G; ++i)
        for (int j = 0; j < G; ++j) f[3] += (i - mux) * (i - mux) * p(i, j);
    for (int i = 0; i < G; ++i)
        for (int j = 0; j < G; ++j) f[4] += p(i, j) / (1.0 + (i - j) * (i - j));
    for (int k = 0; k < 2 * G - 1; ++k) f[5] += k * vs[k];
    for (int k = 0; k < 2 * G - 1; ++k) f[6] += (k - f[5]) * (k - f[5]) * vs[k];
    for (int k = 0; k < 2 * G - 1; ++k) f[7] -= plogp(vs[k]);
    for (int i = 0; i < G; ++i)
        for (int j = 0; j < G; ++j) f[8] -= plogp(p(i, j));
    {
        double md = 0.0;
        for (int k = 0; k < G; ++k) md += k * vd[k];
        for (int k = 0; k < G; ++k) f[9] += (k - md) * (k - md) * vd[k];
    }
    for (int k = 0; k < G; ++k) f[10] -= plogp(vd[k]);
    {
        double hx = 0.0, hy = 0.0, hxy1 = 0.0, hxy2 = 0.0;
        for (int i = 0; i < G; ++i) {
            hx -= plogp(vx[i]);
            hy -= plogp(vy[i]);
        }
        for (int i = 0; i < G; ++i)
            for (int j = 0; j < G; ++j) {
                const double q = vx[i] * vy[j];
                if (q <= 0.0) continue;
                hxy1 -= p(i, j) * std::log(q);
                hxy2 -= q * std::log(q);
            }
        const double hmax = std::max(hx, hy);
        f[11] = hmax > 0.0 ? (f[8] - hxy1) / hmax : 0.0;
        f[12] = std::sqrt(1.0 - std::exp(-2.0 * std::max(hxy2 - f[8], 0.0)));
    }
    return f;
}

}  // namespace cishtex::testing
