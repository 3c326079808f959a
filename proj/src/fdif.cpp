#include "fdif/fdif.hpp"

#include <cmath>
#include <stdexcept>

#include "fdif/direction.hpp"
#include "fdif/parallel.hpp"

namespace fdif {

void FdifConfig::validate() const {
    if (iterations < 1) throw std::invalid_argument("FdifConfig: iterations must be >= 1");
    if (kernel_side < 3 || kernel_side % 2 == 0)
        throw std::invalid_argument("FdifConfig: kernel_side must be odd and >= 3");
    if (scales < 2) throw std::invalid_argument("FdifConfig: scales must be >= 2");
    if (!(alpha_min > 0.0) || alpha_max < alpha_min)
        throw std::invalid_argument("FdifConfig: alpha clamp must satisfy 0 < min <= max");
    if (neighborhood != 0 && (neighborhood < 3 || neighborhood % 2 == 0))
        throw std::invalid_argument("FdifConfig: neighborhood must be odd and >= 3");
    if (direction_window != 0 && (direction_window < 3 || direction_window % 2 == 0))
        throw std::invalid_argument("FdifConfig: direction_window must be odd and >= 3");
    if (!(gradient_sigma > 0.0))
        throw std::invalid_argument("FdifConfig: gradient_sigma must be positive");
    if (forced_alpha != 0.0 && (forced_alpha < alpha_min || forced_alpha > alpha_max))
        throw std::invalid_argument("FdifConfig: forced_alpha outside the clamp range");
}

namespace {

// Window sum of squares with mirror padding; L2 norm = sqrt of this.
Image window_sumsq(const Image& img, int side) {
    const int c = side / 2;
    Image sq(img.width, img.height), tmp(img.width, img.height), out(img.width, img.height);
    for (size_t i = 0; i < img.data.size(); ++i) sq.data[i] = img.data[i] * img.data[i];
    parallel_for(img.height, [&](int y0, int y1) {
        for (int y = y0; y < y1; ++y)
            for (int x = 0; x < img.width; ++x) {
                double acc = 0.0;
                for (int k = -c; k <= c; ++k) acc += sq.at(reflect_index(x + k, img.width), y);
                tmp.at(x, y) = acc;
            }
    });
    parallel_for(img.height, [&](int y0, int y1) {
        for (int y = y0; y < y1; ++y)
            for (int x = 0; x < img.width; ++x) {
                double acc = 0.0;
                for (int k = -c; k <= c; ++k) acc += tmp.at(x, reflect_index(y + k, img.height));
                out.at(x, y) = acc;
            }
    });
    return out;
}

Image transform_impl(const Image& filtered, const Image& alpha, int neighborhood) {
    Image v(filtered.width, filtered.height), w(filtered.width, filtered.height);
    for (size_t i = 0; i < filtered.data.size(); ++i) {
        const double r = filtered.data[i] > 0.0 ? filtered.data[i] : 0.0;
        v.data[i] = r;
        w.data[i] = std::pow(r, alpha.data[i]);
    }
    const Image nv = window_sumsq(v, neighborhood);
    const Image nw = window_sumsq(w, neighborhood);
    Image out(filtered.width, filtered.height);
    for (size_t i = 0; i < out.data.size(); ++i) {
        const double den = std::sqrt(nw.data[i]);
        const double ratio = den < 1e-12 ? 1.0 : std::sqrt(nv.data[i]) / den;
        out.data[i] = ratio * w.data[i];
    }
    return out;
}

}  // namespace

Image fd_preserving_transform(const Image& filtered, const FractalMap& d_orig,
                              const FractalMap& d_filt, int neighborhood,
                              double alpha_min, double alpha_max) {
    validate_image(filtered, "fd_preserving_transform");
    if (!filtered.same_shape(d_orig.dimension) || !filtered.same_shape(d_filt.dimension))
        throw std::invalid_argument("fd_preserving_transform: shape mismatch");
    if (neighborhood < 3 || neighborhood % 2 == 0)
        throw std::invalid_argument("fd_preserving_transform: neighborhood must be odd and >= 3");
    Image alpha(filtered.width, filtered.height);
    for (size_t i = 0; i < alpha.data.size(); ++i) {
        const double d = d_orig.dimension.data[i];
        const double df = d_filt.dimension.data[i];
        double a = df != 0.0 ? d / df : alpha_max;
        if (!(a > 0.0)) a = alpha_min;  // degenerate or negative ratio
        a = a < alpha_min ? alpha_min : (a > alpha_max ? alpha_max : a);
        alpha.data[i] = a;
    }
    return transform_impl(filtered, alpha, neighborhood);
}

Image fd_preserving_transform_fixed(const Image& filtered, double alpha, int neighborhood) {
    validate_image(filtered, "fd_preserving_transform");
    if (!(alpha > 0.0)) throw std::invalid_argument("fd_preserving_transform: alpha must be positive");
    if (neighborhood < 3 || neighborhood % 2 == 0)
        throw std::invalid_argument("fd_preserving_transform: neighborhood must be odd and >= 3");
    Image a(filtered.width, filtered.height, alpha);
    return transform_impl(filtered, a, neighborhood);
}

Image fdif_iterate(const Image& img, const FdifConfig& cfg) {
    validate_image(img, "fdif_iterate");
    cfg.validate();
    Image current = img;
    for (int it = 0; it < cfg.iterations; ++it) {
        FractalMap d_orig;
        if (cfg.forced_alpha == 0.0) d_orig = estimate_fractal(current, cfg.scales);
        const DirectionField field =
            direction_field(current, cfg.field_window(), cfg.gradient_sigma);
        const Image filtered = adaptive_filter(current, field, cfg.kernel_side);
        if (cfg.forced_alpha == 0.0) {
            const FractalMap d_filt = estimate_fractal(filtered, cfg.scales);
            current = fd_preserving_transform(filtered, d_orig, d_filt, cfg.norm_window(),
                                              cfg.alpha_min, cfg.alpha_max);
        } else {
            current = fd_preserving_transform_fixed(filtered, cfg.forced_alpha,
                                                    cfg.norm_window());
        }
    }
    return clip01(std::move(current));
}

}  // namespace fdif
