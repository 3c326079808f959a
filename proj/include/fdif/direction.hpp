#pragma once

#include <vector>

#include "fdif/image.hpp"

namespace fdif {

/// Per-pixel dominant orientation of the image structure, each angle in [0, pi).
struct DirectionField {
    Image theta;
};

struct FilterBank {
    std::vector<Kernel> kernels;
    std::vector<double> angles;
    int count() const { return static_cast<int>(kernels.size()); }
};

/// Cross-section of the rasterized filter line: weight falls off with the
/// perpendicular distance d from the cell center to the line,
/// exp(-d^2 / (2 * kLineSharpness^2)) for d <= kLineCutoff, 0 beyond.
/// The cutoff keeps axis-aligned and diagonal kernels on exactly one row /
/// column / diagonal.
inline constexpr double kLineSharpness = 0.2;
inline constexpr double kLineCutoff = 0.7;

/// Dominant orientation from the structure tensor of the sigma-smoothed
/// gradients gathered over a window x window neighborhood.
DirectionField direction_field(const Image& img, int window, double sigma);

/// Line kernel through the center at orientation theta, renormalized to unit sum.
Kernel directional_filter(double theta, int side);

/// N kernels at angles k*pi/N, k = 0..N-1.
FilterBank build_filter_bank(int count, int side);

/// Per-pixel filtering with directional_filter(theta(x), side), mirror padding.
Image adaptive_filter(const Image& img, const DirectionField& field, int side);

}  // namespace fdif
