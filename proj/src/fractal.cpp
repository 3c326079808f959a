#include "fdif/fractal.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

#include "fdif/parallel.hpp"

namespace fdif {

Kernel gaussian_kernel(int r) {
    if (r < 1) throw std::invalid_argument("gaussian_kernel: scale must be >= 1");
    const int c = 3 * r;  // ceil(3r) for integer r
    const int side = 2 * c + 1;
    std::vector<double> g(c + 1);
    for (int i = 0; i <= c; ++i)
        g[i] = std::exp(-static_cast<double>(i) * i / (static_cast<double>(r) * r));
    double sum1d = g[0];
    for (int i = 1; i <= c; ++i) sum1d += 2.0 * g[i];
    Kernel k(side);
    for (int y = -c; y <= c; ++y)
        for (int x = -c; x <= c; ++x)
            k.at(x + c, y + c) = (g[std::abs(x)] / sum1d) * (g[std::abs(y)] / sum1d);
    return k;
}

namespace {

// Cell (dx,dy) weight = fraction of the unit cell inside the disc of radius r,
// sampled on a 64x64 midpoint subgrid. Computed for one octant and copied to
// the other seven so the weights are bit-exactly symmetric under the grid
// isometries.
Kernel make_disc_kernel(int r) {
    constexpr int kSub = 64;
    const int side = 2 * r + 1;
    Kernel k(side);
    const double r2 = static_cast<double>(r) * r;
    for (int dy = 0; dy <= r; ++dy) {
        for (int dx = dy; dx <= r; ++dx) {
            int inside = 0;
            for (int sy = 0; sy < kSub; ++sy) {
                const double y = dy + (sy + 0.5) / kSub - 0.5;
                for (int sx = 0; sx < kSub; ++sx) {
                    const double x = dx + (sx + 0.5) / kSub - 0.5;
                    if (x * x + y * y <= r2) ++inside;
                }
            }
            const double w = static_cast<double>(inside) / (kSub * kSub);
            const int pairs[8][2] = {{dx, dy},  {-dx, dy}, {dx, -dy}, {-dx, -dy},
                                     {dy, dx},  {-dy, dx}, {dy, -dx}, {-dy, -dx}};
            for (auto& p : pairs) k.at(p[0] + r, p[1] + r) = w;
        }
    }
    return k;
}

// Offsets of a dihedral orbit in the fixed C4 order o, Ro, R2o, R3o (R = 90deg
// rotation), optionally followed by the mirrored quadruple. Summing pairs
// (p0+p2)+(p1+p3) makes the per-orbit sum invariant, bit for bit, under the
// grid isometries (FP addition is commutative; the pair structure absorbs the
// induced permutations).
struct Orbit {
    double weight = 0.0;
    int n = 0;            // 1, 4 or 8 offsets
    int off[8][2] = {};   // (dx, dy)
};

std::vector<Orbit> disc_orbits(const Kernel& disc) {
    const int r = disc.side / 2;
    std::vector<Orbit> orbits;
    for (int a = 0; a <= r; ++a) {
        for (int b = 0; b <= a; ++b) {
            const double w = disc.at(a + r, b + r);
            if (w == 0.0) continue;
            Orbit o;
            o.weight = w;
            if (a == 0 && b == 0) {
                o.n = 1;
                o.off[0][0] = 0; o.off[0][1] = 0;
            } else if (b == 0 || a == b) {
                o.n = 4;
                const int base[2] = {a, b};
                int v[2] = {base[0], base[1]};
                for (int i = 0; i < 4; ++i) {
                    o.off[i][0] = v[0]; o.off[i][1] = v[1];
                    const int nx = -v[1], ny = v[0];  // rotate 90
                    v[0] = nx; v[1] = ny;
                }
            } else {
                o.n = 8;
                int v[2] = {a, b};
                for (int i = 0; i < 4; ++i) {
                    o.off[i][0] = v[0]; o.off[i][1] = v[1];
                    const int nx = -v[1], ny = v[0];
                    v[0] = nx; v[1] = ny;
                }
                int m[2] = {b, a};  // transpose = mirror image of the first quadruple
                for (int i = 0; i < 4; ++i) {
                    o.off[4 + i][0] = m[0]; o.off[4 + i][1] = m[1];
                    const int nx = -m[1], ny = m[0];
                    m[0] = nx; m[1] = ny;
                }
            }
            orbits.push_back(o);
        }
    }
    return orbits;
}

const Kernel& cached_disc(int r) {
    static std::mutex mu;
    static std::map<int, Kernel> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(r);
    if (it == cache.end()) it = cache.emplace(r, make_disc_kernel(r)).first;
    return it->second;
}

// One symmetric 1D pass: out(i) = w0 f(i) + sum_k wk (f(i-k) + f(i+k)).
// The paired accumulation keeps the pass bit-exact under index reversal.
void pass_rows(const Image& in, Image& out, const std::vector<double>& w) {
    const int c = static_cast<int>(w.size()) - 1;
    parallel_for(in.height, [&](int y0, int y1) {
        for (int y = y0; y < y1; ++y) {
            const double* row = in.data.data() + static_cast<size_t>(y) * in.width;
            double* orow = out.data.data() + static_cast<size_t>(y) * in.width;
            for (int x = 0; x < in.width; ++x) {
                double acc = w[0] * row[x];
                for (int k = 1; k <= c; ++k) {
                    const double a = row[reflect_index(x - k, in.width)];
                    const double b = row[reflect_index(x + k, in.width)];
                    acc += w[k] * (a + b);
                }
                orow[x] = acc;
            }
        }
    });
}

void pass_cols(const Image& in, Image& out, const std::vector<double>& w) {
    const int c = static_cast<int>(w.size()) - 1;
    parallel_for(in.height, [&](int y0, int y1) {
        for (int y = y0; y < y1; ++y) {
            for (int x = 0; x < in.width; ++x) {
                double acc = w[0] * in.at(x, y);
                for (int k = 1; k <= c; ++k) {
                    const double a = in.at(x, reflect_index(y - k, in.height));
                    const double b = in.at(x, reflect_index(y + k, in.height));
                    acc += w[k] * (a + b);
                }
                out.at(x, y) = acc;
            }
        }
    });
}

std::vector<double> gauss_half_profile(int r) {
    const int c = 3 * r;
    std::vector<double> g(c + 1);
    for (int i = 0; i <= c; ++i)
        g[i] = std::exp(-static_cast<double>(i) * i / (static_cast<double>(r) * r));
    double sum = g[0];
    for (int i = 1; i <= c; ++i) sum += 2.0 * g[i];
    for (double& v : g) v /= sum;
    return g;
}

}  // namespace

Kernel disc_kernel(int r) {
    if (r < 1) throw std::invalid_argument("disc_kernel: radius must be >= 1");
    return cached_disc(r);
}

namespace detail {

// Averaging the two separable pass orders restores the symmetry that a single
// H-then-V order lacks: rotating the input by 90 degrees swaps the two terms,
// and FP addition commutes.
Image smooth_symmetric(const Image& img, int r) {
    const auto w = gauss_half_profile(r);
    Image hv(img.width, img.height), vh(img.width, img.height), tmp(img.width, img.height);
    pass_rows(img, tmp, w);
    pass_cols(tmp, hv, w);
    pass_cols(img, tmp, w);
    pass_rows(tmp, vh, w);
    Image out(img.width, img.height);
    for (size_t i = 0; i < out.data.size(); ++i)
        out.data[i] = (hv.data[i] + vh.data[i]) * 0.5;
    return out;
}

}  // namespace detail

MeasurementStack multiscale_measurements(const Image& img, int scales) {
    validate_image(img, "multiscale_measurements");
    if (scales < 2)
        throw std::invalid_argument("multiscale_measurements: need at least 2 scales for the regression");
    MeasurementStack stack;
    for (int r = 1; r <= scales; ++r) {
        const Image smoothed = detail::smooth_symmetric(img, r);
        const auto orbits = disc_orbits(cached_disc(r));
        Image layer(img.width, img.height);
        parallel_for(img.height, [&](int y0, int y1) {
            for (int y = y0; y < y1; ++y) {
                for (int x = 0; x < img.width; ++x) {
                    double acc = 0.0;
                    for (const Orbit& o : orbits) {
                        double s;
                        auto v = [&](int i) {
                            return smoothed.at(reflect_index(x + o.off[i][0], img.width),
                                               reflect_index(y + o.off[i][1], img.height));
                        };
                        if (o.n == 1) {
                            s = v(0);
                        } else if (o.n == 4) {
                            s = (v(0) + v(2)) + (v(1) + v(3));
                        } else {
                            s = ((v(0) + v(2)) + (v(1) + v(3))) +
                                ((v(4) + v(6)) + (v(5) + v(7)));
                        }
                        acc += o.weight * s;
                    }
                    layer.at(x, y) = acc < kMeasurementFloor ? kMeasurementFloor : acc;
                }
            }
        });
        stack.radii.push_back(r);
        stack.layers.push_back(std::move(layer));
    }
    return stack;
}

FractalMap fit_loglog(const MeasurementStack& stack) {
    const int R = static_cast<int>(stack.radii.size());
    if (R < 2) throw std::invalid_argument("fit_loglog: need at least 2 layers");
    for (const auto& l : stack.layers)
        if (!l.same_shape(stack.layers.front()))
            throw std::invalid_argument("fit_loglog: layer shapes differ");

    std::vector<double> xs(R);
    double xmean = 0.0;
    for (int i = 0; i < R; ++i) {
        xs[i] = std::log(2.0 * stack.radii[i]);
        xmean += xs[i];
    }
    xmean /= R;
    double sxx = 0.0;
    for (int i = 0; i < R; ++i) sxx += (xs[i] - xmean) * (xs[i] - xmean);

    const Image& first = stack.layers.front();
    FractalMap map{Image(first.width, first.height), Image(first.width, first.height)};
    parallel_for(first.height, [&](int y0, int y1) {
        std::vector<double> ys(R);
        for (int y = y0; y < y1; ++y) {
            for (int x = 0; x < first.width; ++x) {
                double ymean = 0.0;
                for (int i = 0; i < R; ++i) {
                    ys[i] = std::log(stack.layers[i].at(x, y));
                    ymean += ys[i];
                }
                ymean /= R;
                double sxy = 0.0;
                for (int i = 0; i < R; ++i) sxy += (xs[i] - xmean) * (ys[i] - ymean);
                const double d = sxy / sxx;
                map.dimension.at(x, y) = d;
                map.log_length.at(x, y) = ymean - d * xmean;
            }
        }
    });
    return map;
}

FractalMap estimate_fractal(const Image& img, int scales) {
    return fit_loglog(multiscale_measurements(img, scales));
}

}  // namespace fdif
