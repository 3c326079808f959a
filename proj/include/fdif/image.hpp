#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace fdif {

/// Grayscale image: row-major grid of real intensities, canonical range [0,1].
struct Image {
    int width = 0;
    int height = 0;
    std::vector<double> data;

    Image() = default;
    Image(int w, int h, double fill = 0.0)
        : width(w), height(h), data(static_cast<size_t>(w) * h, fill) {
        if (w < 1 || h < 1) throw std::invalid_argument("Image: width and height must be >= 1");
    }

    double& at(int x, int y) { return data[static_cast<size_t>(y) * width + x]; }
    double at(int x, int y) const { return data[static_cast<size_t>(y) * width + x]; }
    size_t size() const { return data.size(); }
    bool same_shape(const Image& o) const { return width == o.width && height == o.height; }
};

struct BinaryMap {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bits;

    BinaryMap() = default;
    BinaryMap(int w, int h) : width(w), height(h), bits(static_cast<size_t>(w) * h, 0) {}

    std::uint8_t& at(int x, int y) { return bits[static_cast<size_t>(y) * width + x]; }
    std::uint8_t at(int x, int y) const { return bits[static_cast<size_t>(y) * width + x]; }
    long long count() const {
        long long n = 0;
        for (auto b : bits) n += b ? 1 : 0;
        return n;
    }
};

/// Square convolution kernel with odd side.
struct Kernel {
    int side = 0;
    std::vector<double> weights;

    Kernel() = default;
    explicit Kernel(int s) : side(s), weights(static_cast<size_t>(s) * s, 0.0) {}

    double& at(int x, int y) { return weights[static_cast<size_t>(y) * side + x]; }
    double at(int x, int y) const { return weights[static_cast<size_t>(y) * side + x]; }
    double sum() const {
        double s = 0.0;
        for (double w : weights) s += w;
        return s;
    }
};

/// Symmetric (half-sample mirror) boundary index, valid for any integer i.
inline int reflect_index(int i, int n) {
    const int period = 2 * n;
    int m = i % period;
    if (m < 0) m += period;
    return m < n ? m : period - 1 - m;
}

void validate_image(const Image& img, const std::string& what);

Image clip01(Image img);
double mean_intensity(const Image& img);

/// Exact grid transforms (used by invariance tests and fixtures).
Image rotate90(const Image& img);   // (x,y) -> (y, W-1-x)
Image rotate180(const Image& img);
Image mirror_h(const Image& img);   // horizontal flip (left-right)
Image upscale2_nearest(const Image& img);

}  // namespace fdif
