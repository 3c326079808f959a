#pragma once

// Shared synthetic fixtures and independent brute-force oracles.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "fdif/direction.hpp"
#include "fdif/image.hpp"

namespace fixtures {

using fdif::BinaryMap;
using fdif::Image;
using fdif::Kernel;

constexpr double kPi = 3.14159265358979323846;

inline Image constant(int w, int h, double v) { return Image(w, h, v); }

inline Image random_image(int w, int h, std::uint64_t seed, double lo = 0.0, double hi = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(lo, hi);
    Image img(w, h);
    for (double& v : img.data) v = uni(rng);
    return img;
}

// Line through (cx, cy) at orientation theta with the same soft cross-profile
// the directional filters use.
inline void add_analytic_line(Image& img, double cx, double cy, double theta,
                              double amplitude, double sharpness = fdif::kLineSharpness,
                              double cutoff = fdif::kLineCutoff, BinaryMap* gt = nullptr,
                              double gt_halfwidth = 0.5) {
    const double s = std::sin(theta), c = std::cos(theta);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            const double d = std::abs((x - cx) * s - (y - cy) * c);
            if (d <= cutoff)
                img.at(x, y) += amplitude * std::exp(-d * d / (2.0 * sharpness * sharpness));
            if (gt && d <= gt_halfwidth) gt->at(x, y) = 1;
        }
}

inline Image analytic_line_image(double theta, int size, double amplitude = 1.0) {
    Image img(size, size);
    add_analytic_line(img, size / 2, size / 2, theta, amplitude);
    return img;
}

// Stripes varying only along the given wave direction: structure orientation
// is perpendicular to it.
inline Image stripes(int w, int h, double structure_theta, double freq = 0.7,
                     double base = 0.5, double amp = 0.4) {
    Image img(w, h);
    const double nx = std::sin(structure_theta), ny = -std::cos(structure_theta);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            img.at(x, y) = base + amp * std::sin((x * nx + y * ny) * freq);
    return img;
}

struct CurveFixture {
    Image image;
    BinaryMap gt;
};

// Curves buried in uniform noise plus optional speckle dots: the regime the
// filtering pipeline is meant for (bright structures in a noisy field).
inline CurveFixture buried_curves(int size, std::uint64_t seed, double base, double noise_amp,
                                  double curve_amp, double curve_sigma, int n_lines,
                                  double speckle_density = 0.0, double speckle_amp = 0.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    CurveFixture fx{Image(size, size, base), BinaryMap(size, size)};
    for (double& v : fx.image.data) v += noise_amp * uni(rng);
    const int n_speck = static_cast<int>(speckle_density * size * size);
    for (int i = 0; i < n_speck; ++i) {
        const int x = static_cast<int>(uni(rng) * size) % size;
        const int y = static_cast<int>(uni(rng) * size) % size;
        fx.image.at(x, y) += speckle_amp * uni(rng);
    }
    for (int i = 0; i < n_lines; ++i) {
        const int k = static_cast<int>(uni(rng) * 30) % 30;
        const double theta = k * kPi / 30.0;
        const double cx = size * (0.2 + 0.6 * uni(rng));
        const double cy = size * (0.2 + 0.6 * uni(rng));
        add_analytic_line(fx.image, cx, cy, theta, curve_amp, curve_sigma, 2.0, &fx.gt, 0.75);
    }
    fx.image = fdif::clip01(std::move(fx.image));
    return fx;
}

// ---- Von Koch curve rasterization ----

inline void bresenham(Image& img, int x0, int y0, int x1, int y1, double v = 1.0) {
    const int dx = std::abs(x1 - x0), dy = std::abs(y1 - y0);
    const int sx = x0 < x1 ? 1 : -1, sy = y0 < y1 ? 1 : -1;
    int err = dx - dy, x = x0, y = y0;
    while (true) {
        if (x >= 0 && x < img.width && y >= 0 && y < img.height) img.at(x, y) = v;
        if (x == x1 && y == y1) break;
        const int e2 = 2 * err;
        if (e2 > -dy) {
            err -= dy;
            x += sx;
        }
        if (e2 < dx) {
            err += dx;
            y += sy;
        }
    }
}

inline Image koch_raster(int level, int size, int margin = 16) {
    std::vector<double> px{0.0, 1.0}, py{0.0, 0.0};
    const double c60 = std::cos(-kPi / 3.0), s60 = std::sin(-kPi / 3.0);
    for (int l = 0; l < level; ++l) {
        std::vector<double> nx{px[0]}, ny{py[0]};
        for (size_t i = 0; i + 1 < px.size(); ++i) {
            const double ax = px[i], ay = py[i], bx = px[i + 1], by = py[i + 1];
            const double dx = (bx - ax) / 3.0, dy = (by - ay) / 3.0;
            const double p1x = ax + dx, p1y = ay + dy;
            const double p3x = ax + 2 * dx, p3y = ay + 2 * dy;
            const double p2x = p1x + c60 * dx - s60 * dy;
            const double p2y = p1y + s60 * dx + c60 * dy;
            nx.insert(nx.end(), {p1x, p2x, p3x, bx});
            ny.insert(ny.end(), {p1y, p2y, p3y, by});
        }
        px = std::move(nx);
        py = std::move(ny);
    }
    Image img(size, size);
    const double span = size - 2.0 * margin;
    for (size_t i = 0; i + 1 < px.size(); ++i) {
        const int x0 = static_cast<int>(std::lround(margin + px[i] * span));
        const int y0 = static_cast<int>(std::lround(size / 2.0 + py[i] * span));
        const int x1 = static_cast<int>(std::lround(margin + px[i + 1] * span));
        const int y1 = static_cast<int>(std::lround(size / 2.0 + py[i + 1] * span));
        bresenham(img, x0, y0, x1, y1);
    }
    return img;
}

// ---- independent brute-force oracles ----

// Plain nested-loop convolution with mirror padding (no orbit ordering).
inline Image naive_conv(const Image& img, const Kernel& k) {
    const int c = k.side / 2;
    Image out(img.width, img.height);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            double acc = 0.0;
            for (int dy = -c; dy <= c; ++dy)
                for (int dx = -c; dx <= c; ++dx)
                    acc += k.at(dx + c, dy + c) *
                           img.at(fdif::reflect_index(x + dx, img.width),
                                  fdif::reflect_index(y + dy, img.height));
            out.at(x, y) = acc;
        }
    return out;
}

inline double mean_over(const Image& img, const BinaryMap& mask, bool value) {
    double acc = 0.0;
    long long n = 0;
    for (size_t i = 0; i < img.data.size(); ++i)
        if ((mask.bits[i] != 0) == value) {
            acc += img.data[i];
            ++n;
        }
    return n ? acc / n : 0.0;
}

// Best F1 over a fixed threshold sweep, separating mask pixels by value.
inline double separability_f1(const Image& img, const BinaryMap& mask) {
    double best = 0.0;
    for (int i = 1; i < 50; ++i) {
        const double t = i / 50.0;
        long long tp = 0, fp = 0, fn = 0;
        for (size_t j = 0; j < img.data.size(); ++j) {
            const bool b = img.data[j] > t;
            if (b && mask.bits[j]) ++tp;
            if (b && !mask.bits[j]) ++fp;
            if (!b && mask.bits[j]) ++fn;
        }
        if (tp) {
            const double p = static_cast<double>(tp) / (tp + fp);
            const double r = static_cast<double>(tp) / (tp + fn);
            best = std::max(best, 2.0 * p * r / (p + r));
        }
    }
    return best;
}

}  // namespace fixtures
