#include "fdif/image.hpp"

#include <cmath>

namespace fdif {

void validate_image(const Image& img, const std::string& what) {
    if (img.width < 1 || img.height < 1)
        throw std::invalid_argument(what + ": empty image");
    if (img.data.size() != static_cast<size_t>(img.width) * img.height)
        throw std::invalid_argument(what + ": data length does not match width*height");
    for (double v : img.data)
        if (!std::isfinite(v))
            throw std::invalid_argument(what + ": non-finite pixel value");
}

Image clip01(Image img) {
    for (double& v : img.data) v = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
    return img;
}

double mean_intensity(const Image& img) {
    double s = 0.0;
    for (double v : img.data) s += v;
    return s / static_cast<double>(img.size());
}

Image rotate90(const Image& img) {
    Image out(img.height, img.width);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            out.at(img.height - 1 - y, x) = img.at(x, y);
    return out;
}

Image rotate180(const Image& img) {
    Image out(img.width, img.height);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            out.at(img.width - 1 - x, img.height - 1 - y) = img.at(x, y);
    return out;
}

Image mirror_h(const Image& img) {
    Image out(img.width, img.height);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            out.at(img.width - 1 - x, y) = img.at(x, y);
    return out;
}

Image upscale2_nearest(const Image& img) {
    Image out(img.width * 2, img.height * 2);
    for (int y = 0; y < out.height; ++y)
        for (int x = 0; x < out.width; ++x)
            out.at(x, y) = img.at(x / 2, y / 2);
    return out;
}

}  // namespace fdif
