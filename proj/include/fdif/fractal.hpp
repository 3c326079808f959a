#pragma once

#include <vector>

#include "fdif/image.hpp"

namespace fdif {

/// Per-pixel fractal dimension D(x) and log fractal length L(x) of the
/// log-log regression log mu(B_r(x)) = D(x) log 2r + L(x).
struct FractalMap {
    Image dimension;
    Image log_length;
};

/// Multiscale ball measurements mu(B_r(x)) for r = 1..R.
struct MeasurementStack {
    std::vector<int> radii;
    std::vector<Image> layers;
};

inline constexpr double kMeasurementFloor = 1e-8;

/// 2D Gaussian kernel on a (2*ceil(3r)+1)^2 support, built separably from the
/// 1D profile exp(-x^2/r^2) per axis and renormalized to unit sum.
Kernel gaussian_kernel(int r);

/// Euclidean disc of radius r as cell-area fractions on a (2r+1)^2 grid.
/// Weight total is pi r^2 up to supersampling error, which keeps the ball
/// measure of a constant image growing as r^2.
Kernel disc_kernel(int r);

/// Gaussian-smooth then sum over the weighted disc, per radius, with mirror
/// padding everywhere. Values are floored at kMeasurementFloor.
/// Both stages use summation orders that commute bit-exactly with the grid
/// isometries (90/180 degree rotations, flips).
MeasurementStack multiscale_measurements(const Image& img, int scales);

/// Closed-form per-pixel least-squares fit of (log 2r, log mu_r).
FractalMap fit_loglog(const MeasurementStack& stack);

FractalMap estimate_fractal(const Image& img, int scales);

namespace detail {
/// Gaussian smoothing pass used by the measurements (exposed for tests).
Image smooth_symmetric(const Image& img, int r);
}  // namespace detail

}  // namespace fdif
