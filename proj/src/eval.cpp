#include "fdif/eval.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fdif/detect.hpp"

namespace fdif {

namespace {

struct Offset {
    long long d2;
    int dy, dx;
};

// Disc offsets sorted by (distance, raster order) for nearest-first probing.
std::vector<Offset> sorted_offsets(double d_max) {
    const int r = static_cast<int>(std::floor(d_max));
    const double lim = d_max * d_max;
    std::vector<Offset> offs;
    for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx) {
            const long long d2 = static_cast<long long>(dx) * dx + static_cast<long long>(dy) * dy;
            if (static_cast<double>(d2) <= lim) offs.push_back({d2, dy, dx});
        }
    std::sort(offs.begin(), offs.end(), [](const Offset& a, const Offset& b) {
        if (a.d2 != b.d2) return a.d2 < b.d2;
        if (a.dy != b.dy) return a.dy < b.dy;
        return a.dx < b.dx;
    });
    return offs;
}

}  // namespace

MatchCounts match_tolerant(const BinaryMap& pred, const BinaryMap& gt, double d_max) {
    if (pred.width != gt.width || pred.height != gt.height)
        throw std::invalid_argument("match_tolerant: shape mismatch");
    if (d_max < 0.0) throw std::invalid_argument("match_tolerant: d_max must be >= 0");
    const auto offs = sorted_offsets(d_max);
    std::vector<std::uint8_t> taken(gt.bits.size(), 0);
    MatchCounts m;
    long long npred = 0;
    for (int y = 0; y < pred.height; ++y) {
        for (int x = 0; x < pred.width; ++x) {
            if (!pred.at(x, y)) continue;
            ++npred;
            for (const auto& o : offs) {
                const int yy = y + o.dy, xx = x + o.dx;
                if (yy < 0 || yy >= gt.height || xx < 0 || xx >= gt.width) continue;
                const size_t idx = static_cast<size_t>(yy) * gt.width + xx;
                if (gt.bits[idx] && !taken[idx]) {
                    taken[idx] = 1;
                    ++m.tp;
                    break;
                }
            }
        }
    }
    m.fp = npred - m.tp;
    m.fn = gt.count() - m.tp;
    return m;
}

PRPoint make_pr_point(double threshold, long long tp, long long fp, long long fn) {
    PRPoint p;
    p.threshold = threshold;
    p.tp = tp;
    p.fp = fp;
    p.fn = fn;
    p.precision = tp + fp > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
    p.recall = tp + fn > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
    p.f1 = p.precision + p.recall > 0.0
               ? 2.0 * p.precision * p.recall / (p.precision + p.recall)
               : 0.0;
    return p;
}

std::vector<PRPoint> pr_curve(const Image& prob, const BinaryMap& gt,
                              const std::vector<double>& thresholds, double d_max) {
    validate_image(prob, "pr_curve");
    if (thresholds.empty()) throw std::invalid_argument("pr_curve: empty threshold list");
    for (double t : thresholds)
        if (!(t >= 0.0 && t <= 1.0))
            throw std::invalid_argument("pr_curve: thresholds must lie in [0,1]");
    std::vector<PRPoint> out;
    out.reserve(thresholds.size());
    for (double t : thresholds) {
        const MatchCounts m = match_tolerant(fixed_threshold(prob, t), gt, d_max);
        out.push_back(make_pr_point(t, m.tp, m.fp, m.fn));
    }
    return out;
}

std::vector<double> default_threshold_grid() {
    std::vector<double> grid(99);
    for (int i = 0; i < 99; ++i) grid[i] = (i + 1) / 100.0;
    return grid;
}

DatasetMetrics dataset_metrics(const std::vector<std::vector<PRPoint>>& curves) {
    if (curves.empty()) throw std::invalid_argument("dataset_metrics: empty dataset");
    const size_t nt = curves.front().size();
    for (const auto& c : curves) {
        if (c.size() != nt)
            throw std::invalid_argument("dataset_metrics: images use different threshold grids");
        for (size_t i = 0; i < nt; ++i)
            if (c[i].threshold != curves.front()[i].threshold)
                throw std::invalid_argument("dataset_metrics: images use different threshold grids");
    }

    DatasetMetrics out;
    out.per_image = curves;

    // ODS: best shared threshold judged by the mean per-image F1. (The mean
    // form keeps ODS <= OIS unconditionally; the summed-count F1 can exceed
    // the per-image optima on skewed datasets.)
    std::vector<PRPoint> agg(nt);
    for (size_t i = 0; i < nt; ++i) {
        long long tp = 0, fp = 0, fn = 0;
        double f_mean = 0.0;
        for (const auto& c : curves) {
            tp += c[i].tp;
            fp += c[i].fp;
            fn += c[i].fn;
            f_mean += c[i].f1;
        }
        f_mean /= static_cast<double>(curves.size());
        agg[i] = make_pr_point(curves.front()[i].threshold, tp, fp, fn);
        if (f_mean > out.ods) {
            out.ods = f_mean;
            out.ods_threshold = agg[i].threshold;
        }
    }

    // OIS: mean over images of the per-image best F1.
    double ois = 0.0;
    for (const auto& c : curves) {
        double best = 0.0;
        for (const auto& p : c) best = std::max(best, p.f1);
        ois += best;
    }
    out.ois = ois / static_cast<double>(curves.size());

    // AP: running-max precision envelope from high threshold to low, then the
    // trapezoid over recall sorted ascending, anchored at recall 0. Empty
    // predictions (zero recall) carry no area and are skipped.
    std::vector<std::pair<double, double>> env;  // (recall, envelope precision)
    env.reserve(nt);
    double run = 0.0;
    std::vector<size_t> order(nt);
    for (size_t i = 0; i < nt; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        return agg[a].threshold > agg[b].threshold;
    });
    for (size_t i : order) {
        if (agg[i].recall <= 0.0) continue;
        run = std::max(run, agg[i].precision);
        env.emplace_back(agg[i].recall, run);
    }
    if (env.empty()) {
        out.ap = 0.0;
        return out;
    }
    std::sort(env.begin(), env.end());
    double ap = 0.0, prev_r = 0.0, prev_p = env.front().second;
    for (const auto& [r, p] : env) {
        ap += (r - prev_r) * 0.5 * (p + prev_p);
        prev_r = r;
        prev_p = p;
    }
    out.ap = ap;
    return out;
}

}  // namespace fdif
