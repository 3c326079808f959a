#pragma once

#include "fdif/fractal.hpp"
#include "fdif/image.hpp"

namespace fdif {

struct FdifConfig {
    int iterations = 3;
    int kernel_side = 9;
    int scales = 5;
    double alpha_min = 0.25;
    double alpha_max = 4.0;
    int neighborhood = 0;        // 0 -> kernel_side
    int direction_window = 0;    // 0 -> kernel_side
    double gradient_sigma = 1.0;
    double forced_alpha = 0.0;   // > 0 pins alpha instead of D/D_F

    void validate() const;
    int norm_window() const { return neighborhood > 0 ? neighborhood : kernel_side; }
    int field_window() const { return direction_window > 0 ? direction_window : kernel_side; }
};

/// Power-law correction that restores the pre-filter fractal dimension:
/// alpha(x) = clamp(D(x)/D_F(x)), v = max(filtered, 0),
/// out(x) = (||v over B(x)||_2 / ||v^alpha over B(x)||_2) * v(x)^alpha(x),
/// with the ratio taken as 1 when the denominator is below 1e-12.
Image fd_preserving_transform(const Image& filtered, const FractalMap& d_orig,
                              const FractalMap& d_filt, int neighborhood,
                              double alpha_min = 0.25, double alpha_max = 4.0);

/// Variant with a fixed per-pixel alpha (used when pinning alpha).
Image fd_preserving_transform_fixed(const Image& filtered, double alpha,
                                    int neighborhood);

/// Iterative pipeline: estimate dimensions, filter along the direction field,
/// re-estimate, apply the dimension-preserving transform; repeat. The final
/// output (not each iterate) is clipped to [0,1].
Image fdif_iterate(const Image& img, const FdifConfig& cfg);

}  // namespace fdif
