#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fdif/image.hpp"

namespace fdif {

/// Balanced set of flattened side x side patches with center labels.
struct PatchSet {
    int side = 0;
    std::vector<double> patches;       // count x side^2, row-major
    std::vector<std::uint8_t> labels;  // center pixel's ground-truth bit
    int count() const { return static_cast<int>(labels.size()); }
    const double* patch(int i) const { return patches.data() + static_cast<size_t>(i) * side * side; }
};

struct LogisticModel {
    int side = 0;
    std::vector<double> weights;  // side^2 + 1, bias last
};

struct TrainStats {
    std::vector<double> epoch_loss;
    double final_loss = 0.0;
    double train_accuracy = 0.0;
};

/// 256-bin Otsu threshold over [0,1]; constant images map to all zeros.
BinaryMap otsu_threshold(const Image& img);

/// Exposed for tests: the threshold value Otsu picks, or <0 for degenerate input.
double otsu_threshold_value(const Image& img);

BinaryMap fixed_threshold(const Image& img, double t);

/// n/2 patches centered on gt-positive pixels and n/2 on negatives, sampled
/// uniformly without replacement with the given seed. Mirror padding at borders.
PatchSet sample_patches(const Image& feature, const BinaryMap& gt, int side, int n,
                        std::uint64_t seed);

/// Full-batch gradient descent on mean binary cross-entropy from zero init,
/// halving the step whenever a step would increase the loss.
LogisticModel train_logistic(const PatchSet& data, int epochs, double learning_rate,
                             TrainStats* stats = nullptr);

/// Dense per-pixel sigmoid(beta . patch + bias), mirror padding.
Image predict_map(const LogisticModel& model, const Image& feature);

/// Versioned text serialization: "FDIFLR 1", side, weights in decimal text.
void save_model(const LogisticModel& model, const std::string& path);
LogisticModel load_model(const std::string& path);

}  // namespace fdif
