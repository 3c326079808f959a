#include "fdif/fracnn.hpp"

#include <cmath>
#include <stdexcept>

#include "fdif/parallel.hpp"

namespace fdif {

void FracnnConfig::validate() const {
    if (bank_size < 2) throw std::invalid_argument("FracnnConfig: bank_size must be >= 2");
    if (kernel_side < 3 || kernel_side % 2 == 0)
        throw std::invalid_argument("FracnnConfig: kernel_side must be odd and >= 3");
    if (depth < 1) throw std::invalid_argument("FracnnConfig: depth must be >= 1");
    if (!(alpha >= 0.25 && alpha <= 4.0))
        throw std::invalid_argument("FracnnConfig: alpha must lie in [0.25, 4]");
    if (mean_side != 0 && (mean_side < 3 || mean_side % 2 == 0))
        throw std::invalid_argument("FracnnConfig: mean_side must be odd and >= 3");
}

namespace {

struct SparseTap {
    int dx, dy;
    double w;
};

std::vector<SparseTap> sparse_taps(const Kernel& k) {
    std::vector<SparseTap> taps;
    const int c = k.side / 2;
    for (int dy = -c; dy <= c; ++dy)
        for (int dx = -c; dx <= c; ++dx) {
            const double w = k.at(dx + c, dy + c);
            if (w != 0.0) taps.push_back({dx, dy, w});
        }
    return taps;
}

void convolve_into(const Image& img, const std::vector<SparseTap>& taps, int half,
                   Image& out) {
    parallel_for(img.height, [&](int y0, int y1) {
        for (int y = y0; y < y1; ++y) {
            const bool y_interior = y >= half && y < img.height - half;
            for (int x = 0; x < img.width; ++x) {
                double acc = 0.0;
                if (y_interior && x >= half && x < img.width - half) {
                    for (const auto& t : taps)
                        acc += t.w * img.at(x + t.dx, y + t.dy);
                } else {
                    for (const auto& t : taps)
                        acc += t.w * img.at(reflect_index(x + t.dx, img.width),
                                            reflect_index(y + t.dy, img.height));
                }
                out.at(x, y) = acc;
            }
        }
    });
}

Image box_mean(const Image& img, int side) {
    const int c = side / 2;
    Image tmp(img.width, img.height), out(img.width, img.height);
    const double inv = 1.0 / (static_cast<double>(side) * side);
    parallel_for(img.height, [&](int y0, int y1) {
        for (int y = y0; y < y1; ++y)
            for (int x = 0; x < img.width; ++x) {
                double acc = 0.0;
                for (int k = -c; k <= c; ++k) acc += img.at(reflect_index(x + k, img.width), y);
                tmp.at(x, y) = acc;
            }
    });
    parallel_for(img.height, [&](int y0, int y1) {
        for (int y = y0; y < y1; ++y)
            for (int x = 0; x < img.width; ++x) {
                double acc = 0.0;
                for (int k = -c; k <= c; ++k) acc += tmp.at(x, reflect_index(y + k, img.height));
                out.at(x, y) = acc * inv;
            }
    });
    return out;
}

}  // namespace

Image conv_max_layer(const Image& img, const FilterBank& bank) {
    validate_image(img, "conv_max_layer");
    if (bank.count() < 1) throw std::invalid_argument("conv_max_layer: empty bank");
    Image out(img.width, img.height);
    Image buf(img.width, img.height);
    for (int k = 0; k < bank.count(); ++k) {
        const auto taps = sparse_taps(bank.kernels[k]);
        convolve_into(img, taps, bank.kernels[k].side / 2, buf);
        if (k == 0) {
            out.data = buf.data;
        } else {
            for (size_t i = 0; i < out.data.size(); ++i)
                if (buf.data[i] > out.data[i]) out.data[i] = buf.data[i];
        }
    }
    return out;
}

std::vector<int> conv_max_argmax(const Image& img, const FilterBank& bank) {
    validate_image(img, "conv_max_argmax");
    if (bank.count() < 1) throw std::invalid_argument("conv_max_argmax: empty bank");
    Image best(img.width, img.height);
    Image buf(img.width, img.height);
    std::vector<int> arg(img.size(), 0);
    for (int k = 0; k < bank.count(); ++k) {
        const auto taps = sparse_taps(bank.kernels[k]);
        convolve_into(img, taps, bank.kernels[k].side / 2, buf);
        if (k == 0) {
            best.data = buf.data;
        } else {
            for (size_t i = 0; i < best.data.size(); ++i)
                if (buf.data[i] > best.data[i]) {
                    best.data[i] = buf.data[i];
                    arg[i] = k;
                }
        }
    }
    return arg;
}

Image nonlinear_layer(const Image& f_filtered, double alpha, int mean_side,
                      bool rectified_numerator) {
    validate_image(f_filtered, "nonlinear_layer");
    if (!(alpha > 0.0)) throw std::invalid_argument("nonlinear_layer: alpha must be positive");
    if (mean_side < 3 || mean_side % 2 == 0)
        throw std::invalid_argument("nonlinear_layer: mean_side must be odd and >= 3");
    Image rect(f_filtered.width, f_filtered.height);
    Image rpow(f_filtered.width, f_filtered.height);
    for (size_t i = 0; i < rect.data.size(); ++i) {
        const double r = f_filtered.data[i] > 0.0 ? f_filtered.data[i] : 0.0;
        rect.data[i] = r;
        rpow.data[i] = std::pow(r, alpha);
    }
    const Image num_mean = box_mean(rectified_numerator ? rect : f_filtered, mean_side);
    const Image den_mean = box_mean(rpow, mean_side);
    Image out(f_filtered.width, f_filtered.height);
    for (size_t i = 0; i < out.data.size(); ++i) {
        const double den = den_mean.data[i];
        out.data[i] = den < 1e-12 ? 0.0 : num_mean.data[i] * rpow.data[i] / den;
    }
    return out;
}

Image fracnn_forward(const Image& img, const FilterBank& bank, const FracnnConfig& cfg) {
    validate_image(img, "fracnn_forward");
    cfg.validate();
    if (bank.count() != cfg.bank_size)
        throw std::invalid_argument("fracnn_forward: bank size does not match config");
    Image current = img;
    for (int d = 0; d < cfg.depth; ++d)
        current = nonlinear_layer(conv_max_layer(current, bank), cfg.alpha, cfg.box_side(),
                                  cfg.rectified_numerator);
    return clip01(std::move(current));
}

}  // namespace fdif
