#include "fdif/direction.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "fdif/parallel.hpp"

namespace fdif {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<double> gauss_profile_sigma(double sigma) {
    const int c = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    std::vector<double> g(c + 1);
    for (int i = 0; i <= c; ++i)
        g[i] = std::exp(-static_cast<double>(i) * i / (2.0 * sigma * sigma));
    double sum = g[0];
    for (int i = 1; i <= c; ++i) sum += 2.0 * g[i];
    for (double& v : g) v /= sum;
    return g;
}

Image smooth_sigma(const Image& img, double sigma) {
    const auto w = gauss_profile_sigma(sigma);
    const int c = static_cast<int>(w.size()) - 1;
    Image tmp(img.width, img.height), out(img.width, img.height);
    parallel_for(img.height, [&](int y0, int y1) {
        for (int y = y0; y < y1; ++y)
            for (int x = 0; x < img.width; ++x) {
                double acc = w[0] * img.at(x, y);
                for (int k = 1; k <= c; ++k)
                    acc += w[k] * (img.at(reflect_index(x - k, img.width), y) +
                                   img.at(reflect_index(x + k, img.width), y));
                tmp.at(x, y) = acc;
            }
    });
    parallel_for(img.height, [&](int y0, int y1) {
        for (int y = y0; y < y1; ++y)
            for (int x = 0; x < img.width; ++x) {
                double acc = w[0] * tmp.at(x, y);
                for (int k = 1; k <= c; ++k)
                    acc += w[k] * (tmp.at(x, reflect_index(y - k, img.height)) +
                                   tmp.at(x, reflect_index(y + k, img.height)));
                out.at(x, y) = acc;
            }
    });
    return out;
}

inline double wrap_orientation(double t) {
    t = std::fmod(t, kPi);
    if (t < 0.0) t += kPi;
    if (t >= kPi) t -= kPi;
    return t;
}

}  // namespace

DirectionField direction_field(const Image& img, int window, double sigma) {
    validate_image(img, "direction_field");
    if (window < 3 || window % 2 == 0)
        throw std::invalid_argument("direction_field: window must be odd and >= 3");
    if (!(sigma > 0.0))
        throw std::invalid_argument("direction_field: sigma must be positive");

    const Image s = smooth_sigma(img, sigma);
    Image gx(img.width, img.height), gy(img.width, img.height);
    parallel_for(img.height, [&](int y0, int y1) {
        for (int y = y0; y < y1; ++y)
            for (int x = 0; x < img.width; ++x) {
                gx.at(x, y) = 0.5 * (s.at(reflect_index(x + 1, img.width), y) -
                                     s.at(reflect_index(x - 1, img.width), y));
                gy.at(x, y) = 0.5 * (s.at(x, reflect_index(y + 1, img.height)) -
                                     s.at(x, reflect_index(y - 1, img.height)));
            }
    });

    const int c = window / 2;
    DirectionField field{Image(img.width, img.height)};
    parallel_for(img.height, [&](int y0, int y1) {
        for (int y = y0; y < y1; ++y) {
            for (int x = 0; x < img.width; ++x) {
                double axx = 0.0, axy = 0.0, ayy = 0.0;
                for (int dy = -c; dy <= c; ++dy) {
                    const int yy = reflect_index(y + dy, img.height);
                    for (int dx = -c; dx <= c; ++dx) {
                        const int xx = reflect_index(x + dx, img.width);
                        const double h = gx.at(xx, yy), v = gy.at(xx, yy);
                        axx += h * h;
                        axy += h * v;
                        ayy += v * v;
                    }
                }
                const double trace = axx + ayy;
                if (trace < 1e-12) {  // flat region, deterministic fallback
                    field.theta.at(x, y) = 0.0;
                    continue;
                }
                const double half = 0.5 * (axx + ayy);
                const double disc = std::sqrt(0.25 * (axx - ayy) * (axx - ayy) + axy * axy);
                if (disc < 1e-15 * half) {  // isotropic tensor tie
                    field.theta.at(x, y) = 0.0;
                    continue;
                }
                const double lam = half + disc;
                // leading eigenvector of [[axx, axy], [axy, ayy]], stable branch
                double uh, uv;
                if (std::abs(lam - axx) > std::abs(lam - ayy)) {
                    uh = axy;
                    uv = lam - axx;
                } else {
                    uh = lam - ayy;
                    uv = axy;
                }
                if (uh == 0.0 && uv == 0.0) {
                    field.theta.at(x, y) = 0.0;
                    continue;
                }
                // gradient orientation -> structure (tangent) orientation
                field.theta.at(x, y) = wrap_orientation(std::atan2(uh, -uv));
            }
        }
    });
    return field;
}

Kernel directional_filter(double theta, int side) {
    if (side < 3 || side % 2 == 0)
        throw std::invalid_argument("directional_filter: side must be odd and >= 3");
    const int c = side / 2;
    const double s = std::sin(theta), co = std::cos(theta);
    Kernel k(side);
    double sum = 0.0;
    for (int dy = -c; dy <= c; ++dy) {
        for (int dx = -c; dx <= c; ++dx) {
            const double d = std::abs(dx * s - dy * co);
            if (d <= kLineCutoff) {
                const double w = std::exp(-d * d / (2.0 * kLineSharpness * kLineSharpness));
                k.at(dx + c, dy + c) = w;
                sum += w;
            }
        }
    }
    for (double& w : k.weights) w /= sum;
    return k;
}

FilterBank build_filter_bank(int count, int side) {
    if (count < 2) throw std::invalid_argument("build_filter_bank: need at least 2 filters");
    FilterBank bank;
    bank.kernels.reserve(count);
    for (int k = 0; k < count; ++k) {
        const double theta = k * kPi / count;
        bank.angles.push_back(theta);
        bank.kernels.push_back(directional_filter(theta, side));
    }
    return bank;
}

Image adaptive_filter(const Image& img, const DirectionField& field, int side) {
    validate_image(img, "adaptive_filter");
    if (!img.same_shape(field.theta))
        throw std::invalid_argument("adaptive_filter: image and direction field shapes differ");
    if (side < 3 || side % 2 == 0)
        throw std::invalid_argument("adaptive_filter: side must be odd and >= 3");
    const int c = side / 2;
    const double inv2s2 = 1.0 / (2.0 * kLineSharpness * kLineSharpness);
    Image out(img.width, img.height);
    parallel_for(img.height, [&](int y0, int y1) {
        for (int y = y0; y < y1; ++y) {
            for (int x = 0; x < img.width; ++x) {
                const double th = field.theta.at(x, y);
                const double s = std::sin(th), co = std::cos(th);
                double acc = 0.0, wsum = 0.0;
                for (int dy = -c; dy <= c; ++dy) {
                    const int yy = reflect_index(y + dy, img.height);
                    for (int dx = -c; dx <= c; ++dx) {
                        const double d = std::abs(dx * s - dy * co);
                        if (d <= kLineCutoff) {
                            const double w = std::exp(-d * d * inv2s2);
                            acc += w * img.at(reflect_index(x + dx, img.width), yy);
                            wsum += w;
                        }
                    }
                }
                out.at(x, y) = acc / wsum;
            }
        }
    });
    return out;
}

}  // namespace fdif
