#pragma once

#include <vector>

#include "fdif/image.hpp"

namespace fdif {

struct PRPoint {
    double threshold = 0.0;
    long long tp = 0, fp = 0, fn = 0;
    double precision = 0.0, recall = 0.0, f1 = 0.0;
};

struct MatchCounts {
    long long tp = 0, fp = 0, fn = 0;
};

struct DatasetMetrics {
    double ods = 0.0, ois = 0.0, ap = 0.0;
    double ods_threshold = 0.0;
    std::vector<std::vector<PRPoint>> per_image;
};

/// Greedy one-to-one matching: predicted positives in raster order are matched
/// to the nearest unmatched ground-truth positive within Euclidean distance
/// d_max (ties by raster order of the candidates).
MatchCounts match_tolerant(const BinaryMap& pred, const BinaryMap& gt, double d_max);

PRPoint make_pr_point(double threshold, long long tp, long long fp, long long fn);

std::vector<PRPoint> pr_curve(const Image& prob, const BinaryMap& gt,
                              const std::vector<double>& thresholds, double d_max);

/// 99 uniform thresholds 0.01 .. 0.99.
std::vector<double> default_threshold_grid();

/// ODS from dataset-aggregated counts, OIS as mean per-image best F1, AP as
/// the trapezoidal area under the monotone precision envelope over recall.
DatasetMetrics dataset_metrics(const std::vector<std::vector<PRPoint>>& curves);

}  // namespace fdif
