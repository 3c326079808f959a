#include "fdif/detect.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "fdif/io.hpp"
#include "fdif/parallel.hpp"

namespace fdif {

namespace {

constexpr int kBins = 256;

int bin_of(double v) {
    int b = static_cast<int>(v * kBins);
    if (b < 0) b = 0;
    if (b >= kBins) b = kBins - 1;
    return b;
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Numerically stable mean binary cross-entropy of logits z against labels y.
double bce(const std::vector<double>& z, const std::vector<std::uint8_t>& y) {
    double loss = 0.0;
    for (size_t i = 0; i < z.size(); ++i) {
        const double zi = z[i];
        const double softplus = std::max(zi, 0.0) + std::log1p(std::exp(-std::abs(zi)));
        loss += softplus - (y[i] ? zi : 0.0);
    }
    return loss / static_cast<double>(z.size());
}

}  // namespace

double otsu_threshold_value(const Image& img) {
    validate_image(img, "otsu_threshold");
    std::vector<long long> hist(kBins, 0);
    for (double v : img.data) ++hist[bin_of(v)];
    const double total = static_cast<double>(img.size());
    double wsum = 0.0;
    for (int k = 0; k < kBins; ++k) wsum += static_cast<double>(k) * hist[k];
    double w0 = 0.0, s0 = 0.0, best = 0.0;
    int best_k = -1;
    for (int k = 0; k < kBins; ++k) {
        w0 += hist[k];
        s0 += static_cast<double>(k) * hist[k];
        const double w1 = total - w0;
        if (w0 == 0.0 || w1 == 0.0) continue;
        const double m0 = s0 / w0, m1 = (wsum - s0) / w1;
        const double v = w0 * w1 * (m0 - m1) * (m0 - m1);
        if (v > best) {
            best = v;
            best_k = k;
        }
    }
    if (best_k < 0) return -1.0;  // constant image
    return static_cast<double>(best_k + 1) / kBins;
}

BinaryMap otsu_threshold(const Image& img) {
    const double t = otsu_threshold_value(img);
    BinaryMap map(img.width, img.height);
    if (t < 0.0) return map;  // degenerate: all zeros
    for (size_t i = 0; i < img.data.size(); ++i) map.bits[i] = img.data[i] > t ? 1 : 0;
    return map;
}

BinaryMap fixed_threshold(const Image& img, double t) {
    validate_image(img, "fixed_threshold");
    if (!(t >= 0.0 && t <= 1.0))
        throw std::invalid_argument("fixed_threshold: threshold must lie in [0,1]");
    BinaryMap map(img.width, img.height);
    for (size_t i = 0; i < img.data.size(); ++i) map.bits[i] = img.data[i] > t ? 1 : 0;
    return map;
}

PatchSet sample_patches(const Image& feature, const BinaryMap& gt, int side, int n,
                        std::uint64_t seed) {
    validate_image(feature, "sample_patches");
    if (feature.width != gt.width || feature.height != gt.height)
        throw std::invalid_argument("sample_patches: feature and ground truth shapes differ");
    if (side < 3 || side % 2 == 0)
        throw std::invalid_argument("sample_patches: side must be odd and >= 3");
    if (n < 2 || n % 2 != 0)
        throw std::invalid_argument("sample_patches: n must be even and >= 2");

    std::vector<int> pos, neg;
    for (int i = 0; i < feature.width * feature.height; ++i)
        (gt.bits[i] ? pos : neg).push_back(i);
    const int half = n / 2;
    if (static_cast<int>(pos.size()) < half)
        throw std::invalid_argument("sample_patches: not enough positive pixels (" +
                                    std::to_string(pos.size()) + " < " + std::to_string(half) + ")");
    if (static_cast<int>(neg.size()) < half)
        throw std::invalid_argument("sample_patches: not enough negative pixels (" +
                                    std::to_string(neg.size()) + " < " + std::to_string(half) + ")");

    std::mt19937_64 rng(seed);
    auto draw = [&rng](std::vector<int>& ids, int want) {
        // Partial Fisher-Yates: the first `want` entries become the sample.
        for (int i = 0; i < want; ++i) {
            std::uniform_int_distribution<size_t> pick(i, ids.size() - 1);
            std::swap(ids[i], ids[pick(rng)]);
        }
        ids.resize(want);
    };
    draw(pos, half);
    draw(neg, half);

    const int c = side / 2;
    PatchSet set;
    set.side = side;
    set.patches.reserve(static_cast<size_t>(n) * side * side);
    set.labels.reserve(n);
    auto emit = [&](int idx, std::uint8_t label) {
        const int cx = idx % feature.width, cy = idx / feature.width;
        for (int dy = -c; dy <= c; ++dy)
            for (int dx = -c; dx <= c; ++dx)
                set.patches.push_back(feature.at(reflect_index(cx + dx, feature.width),
                                                 reflect_index(cy + dy, feature.height)));
        set.labels.push_back(label);
    };
    for (int i = 0; i < half; ++i) emit(pos[i], 1);
    for (int i = 0; i < half; ++i) emit(neg[i], 0);
    return set;
}

LogisticModel train_logistic(const PatchSet& data, int epochs, double learning_rate,
                             TrainStats* stats) {
    if (data.count() == 0) throw std::invalid_argument("train_logistic: empty patch set");
    bool has_pos = false, has_neg = false;
    for (auto l : data.labels) (l ? has_pos : has_neg) = true;
    if (!has_pos || !has_neg)
        throw std::invalid_argument("train_logistic: both classes must be present");
    if (epochs < 0) throw std::invalid_argument("train_logistic: epochs must be >= 0");
    if (!(learning_rate > 0.0))
        throw std::invalid_argument("train_logistic: learning rate must be positive");

    const int dim = data.side * data.side;
    const int n = data.count();
    LogisticModel model;
    model.side = data.side;
    model.weights.assign(dim + 1, 0.0);

    auto logits = [&](const std::vector<double>& w, std::vector<double>& z) {
        for (int i = 0; i < n; ++i) {
            const double* p = data.patch(i);
            double acc = w[dim];
            for (int j = 0; j < dim; ++j) acc += w[j] * p[j];
            z[i] = acc;
        }
    };

    std::vector<double> z(n), grad(dim + 1), cand(dim + 1);
    logits(model.weights, z);
    double loss = bce(z, data.labels);
    double lr = learning_rate;
    if (stats) stats->epoch_loss.clear();
    for (int e = 0; e < epochs; ++e) {
        std::fill(grad.begin(), grad.end(), 0.0);
        for (int i = 0; i < n; ++i) {
            const double err = sigmoid(z[i]) - (data.labels[i] ? 1.0 : 0.0);
            const double* p = data.patch(i);
            for (int j = 0; j < dim; ++j) grad[j] += err * p[j];
            grad[dim] += err;
        }
        for (double& g : grad) g /= n;

        // Halve the step until the loss is non-increasing.
        double new_loss = loss;
        std::vector<double> znew(n);
        bool accepted = false;
        for (int tries = 0; tries < 60; ++tries) {
            for (int j = 0; j <= dim; ++j) cand[j] = model.weights[j] - lr * grad[j];
            logits(cand, znew);
            new_loss = bce(znew, data.labels);
            if (new_loss <= loss) {
                accepted = true;
                break;
            }
            lr *= 0.5;
        }
        if (accepted) {
            model.weights = cand;
            z = znew;
            loss = new_loss;
        }
        if (stats) stats->epoch_loss.push_back(loss);
    }
    if (stats) {
        stats->final_loss = loss;
        long long correct = 0;
        for (int i = 0; i < n; ++i)
            correct += ((z[i] > 0.0) == (data.labels[i] != 0)) ? 1 : 0;
        stats->train_accuracy = static_cast<double>(correct) / n;
    }
    return model;
}

Image predict_map(const LogisticModel& model, const Image& feature) {
    validate_image(feature, "predict_map");
    if (model.side < 3 || model.side % 2 == 0 ||
        model.weights.size() != static_cast<size_t>(model.side) * model.side + 1)
        throw std::invalid_argument("predict_map: malformed model");
    const int c = model.side / 2;
    const int dim = model.side * model.side;
    Image out(feature.width, feature.height);
    parallel_for(feature.height, [&](int y0, int y1) {
        for (int y = y0; y < y1; ++y) {
            for (int x = 0; x < feature.width; ++x) {
                double acc = model.weights[dim];
                int j = 0;
                for (int dy = -c; dy <= c; ++dy) {
                    const int yy = reflect_index(y + dy, feature.height);
                    for (int dx = -c; dx <= c; ++dx, ++j)
                        acc += model.weights[j] *
                               feature.at(reflect_index(x + dx, feature.width), yy);
                }
                out.at(x, y) = sigmoid(acc);
            }
        }
    });
    return out;
}

void save_model(const LogisticModel& model, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw IoError("cannot open model file for writing: " + path);
    f << "FDIFLR 1\n" << model.side << "\n";
    char buf[64];
    for (double w : model.weights) {
        std::snprintf(buf, sizeof(buf), "%.17g", w);
        f << buf << "\n";
    }
    if (!f) throw IoError("failed while writing model file: " + path);
}

LogisticModel load_model(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open model file: " + path);
    std::string magic;
    int version = 0;
    if (!(f >> magic >> version) || magic != "FDIFLR")
        throw IoError("not a FDIFLR model file (bad magic): " + path);
    if (version != 1)
        throw IoError("unsupported FDIFLR model version " + std::to_string(version) + ": " + path);
    LogisticModel model;
    if (!(f >> model.side) || model.side < 3 || model.side % 2 == 0)
        throw IoError("FDIFLR v1 model has invalid patch side: " + path);
    const size_t want = static_cast<size_t>(model.side) * model.side + 1;
    model.weights.resize(want);
    for (size_t i = 0; i < want; ++i)
        if (!(f >> model.weights[i]))
            throw IoError("FDIFLR v1 model truncated (expected " + std::to_string(want) +
                          " weights): " + path);
    return model;
}

}  // namespace fdif
