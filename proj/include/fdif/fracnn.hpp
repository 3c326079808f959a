#pragma once

#include "fdif/direction.hpp"
#include "fdif/image.hpp"

namespace fdif {

struct FracnnConfig {
    int bank_size = 30;
    int kernel_side = 9;
    int depth = 3;          // conv+nonlinear layer pairs
    double alpha = 2.0;
    int mean_side = 0;      // 0 -> kernel_side
    bool rectified_numerator = false;  // rectify the mean-filter input too

    void validate() const;
    int box_side() const { return mean_side > 0 ? mean_side : kernel_side; }
};

/// Max response over the bank: out(x) = max_k (F_k * img)(x), mirror padding.
/// Ties resolve to the lowest filter index.
Image conv_max_layer(const Image& img, const FilterBank& bank);

/// Index of the filter attaining the max at each pixel (lowest index on ties).
std::vector<int> conv_max_argmax(const Image& img, const FilterBank& bank);

/// Rectified power normalization: r = max(f, 0),
/// out = (M * f) . r^alpha / (M * r^alpha), 0 where the denominator < 1e-12;
/// M is the unit-sum box filter. With rectified_numerator the mean filter
/// sees r instead of f.
Image nonlinear_layer(const Image& f_filtered, double alpha, int mean_side,
                      bool rectified_numerator = false);

/// depth x (conv_max_layer, nonlinear_layer), output clipped to [0,1].
Image fracnn_forward(const Image& img, const FilterBank& bank, const FracnnConfig& cfg);

}  // namespace fdif
