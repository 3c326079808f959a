#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>

#include "fdif/eval.hpp"
#include "fixtures.hpp"

using namespace fdif;

namespace {

BinaryMap from_bits(int w, int h, std::initializer_list<int> ones) {
    BinaryMap m(w, h);
    for (int idx : ones) m.bits[idx] = 1;
    return m;
}

// Maximum bipartite matching between positives within d_max (augmenting paths):
// the exact optimum the greedy matcher is checked against.
long long optimal_matches(const BinaryMap& pred, const BinaryMap& gt, double d_max) {
    std::vector<std::pair<int, int>> ps, gs;
    for (int y = 0; y < pred.height; ++y)
        for (int x = 0; x < pred.width; ++x) {
            if (pred.at(x, y)) ps.emplace_back(x, y);
            if (gt.at(x, y)) gs.emplace_back(x, y);
        }
    const double lim = d_max * d_max;
    std::vector<std::vector<int>> adj(ps.size());
    for (size_t i = 0; i < ps.size(); ++i)
        for (size_t j = 0; j < gs.size(); ++j) {
            const double dx = ps[i].first - gs[j].first;
            const double dy = ps[i].second - gs[j].second;
            if (dx * dx + dy * dy <= lim) adj[i].push_back(static_cast<int>(j));
        }
    std::vector<int> match_g(gs.size(), -1);
    std::vector<char> used;
    std::function<bool(int)> try_kuhn = [&](int v) {
        for (int to : adj[v]) {
            if (used[to]) continue;
            used[to] = 1;
            if (match_g[to] == -1 || try_kuhn(match_g[to])) {
                match_g[to] = v;
                return true;
            }
        }
        return false;
    };
    long long result = 0;
    for (size_t v = 0; v < ps.size(); ++v) {
        used.assign(gs.size(), 0);
        if (try_kuhn(static_cast<int>(v))) ++result;
    }
    return result;
}

BinaryMap random_map(int w, int h, double p, std::mt19937_64& rng) {
    BinaryMap m(w, h);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (auto& b : m.bits) b = uni(rng) < p ? 1 : 0;
    return m;
}

}  // namespace

TEST_CASE("tolerant matching") {
    SUBCASE("shape mismatch is rejected") {
        CHECK_THROWS_AS(match_tolerant(BinaryMap(4, 4), BinaryMap(4, 5), 2.0),
                        std::invalid_argument);
    }
    SUBCASE("identical maps match perfectly for any tolerance") {
        std::mt19937_64 rng(5);
        for (double d : {0.0, 1.0, 2.0}) {
            const BinaryMap m = random_map(6, 6, 0.3, rng);
            const MatchCounts c = match_tolerant(m, m, d);
            CHECK(c.tp == m.count());
            CHECK(c.fp == 0);
            CHECK(c.fn == 0);
        }
    }
    SUBCASE("one-pixel shift on a 5x5 fixture") {
        const BinaryMap gt = from_bits(5, 5, {2 * 5 + 2});    // (2,2)
        const BinaryMap pred = from_bits(5, 5, {2 * 5 + 3});  // (3,2)
        const MatchCounts loose = match_tolerant(pred, gt, 2.0);
        CHECK(loose.tp == 1);
        CHECK(loose.fp == 0);
        CHECK(loose.fn == 0);
        const MatchCounts tight = match_tolerant(pred, gt, 0.5);
        CHECK(tight.tp == 0);
        CHECK(tight.fp == 1);
        CHECK(tight.fn == 1);
    }
    SUBCASE("empty prediction vs nonempty truth") {
        const BinaryMap gt = from_bits(4, 4, {0, 5, 10});
        const MatchCounts c = match_tolerant(BinaryMap(4, 4), gt, 2.0);
        CHECK(c.tp == 0);
        CHECK(c.fp == 0);
        CHECK(c.fn == 3);
    }
    SUBCASE("greedy equals the optimal matcher when every pair is admissible") {
        std::mt19937_64 rng(13);
        const double d_all = 10.0;  // covers any 4x4 pair
        for (int trial = 0; trial < 2000; ++trial) {
            const BinaryMap a = random_map(4, 4, 0.35, rng);
            const BinaryMap b = random_map(4, 4, 0.35, rng);
            const MatchCounts c = match_tolerant(a, b, d_all);
            CHECK(c.tp == optimal_matches(a, b, d_all));
        }
    }
    SUBCASE("swapping prediction and truth swaps fp and fn in the admissible regime") {
        std::mt19937_64 rng(17);
        for (int trial = 0; trial < 500; ++trial) {
            const BinaryMap a = random_map(5, 5, 0.3, rng);
            const BinaryMap b = random_map(5, 5, 0.3, rng);
            const MatchCounts ab = match_tolerant(a, b, 8.0);
            const MatchCounts ba = match_tolerant(b, a, 8.0);
            CHECK(ab.tp == ba.tp);
            CHECK(ab.fp == ba.fn);
            CHECK(ab.fn == ba.fp);
        }
    }
}

TEST_CASE("pr curves") {
    SUBCASE("perfect probabilities at threshold 0.5") {
        Image prob(6, 6, 0.0);
        BinaryMap gt(6, 6);
        prob.at(2, 3) = 1.0;
        gt.at(2, 3) = 1;
        const auto pts = pr_curve(prob, gt, {0.5}, 2.0);
        CHECK(pts[0].precision == 1.0);
        CHECK(pts[0].recall == 1.0);
        CHECK(pts[0].f1 == 1.0);
    }
    SUBCASE("uniform probability below the threshold yields the empty point") {
        const auto pts = pr_curve(Image(5, 5, 0.5), from_bits(5, 5, {12}), {0.6}, 2.0);
        CHECK(pts[0].tp == 0);
        CHECK(pts[0].precision == 0.0);
        CHECK(pts[0].recall == 0.0);
    }
    SUBCASE("hand-computed 5x5 table at three thresholds") {
        Image prob(5, 5, 0.0);
        prob.at(1, 1) = 0.9;  // true curve pixel
        prob.at(3, 3) = 0.6;  // true curve pixel
        prob.at(0, 4) = 0.4;  // false alarm far from truth
        BinaryMap gt(5, 5);
        gt.at(1, 1) = 1;
        gt.at(3, 3) = 1;
        const auto pts = pr_curve(prob, gt, {0.3, 0.5, 0.8}, 1.0);
        // t=0.3: preds {(1,1),(3,3),(0,4)} -> tp=2, fp=1, fn=0
        CHECK(pts[0].tp == 2);
        CHECK(pts[0].fp == 1);
        CHECK(pts[0].fn == 0);
        CHECK(pts[0].precision == doctest::Approx(2.0 / 3).epsilon(1e-12));
        CHECK(pts[0].recall == 1.0);
        // t=0.5: preds {(1,1),(3,3)} -> perfect
        CHECK(pts[1].f1 == 1.0);
        // t=0.8: preds {(1,1)} -> tp=1, fn=1
        CHECK(pts[2].tp == 1);
        CHECK(pts[2].fn == 1);
        CHECK(pts[2].recall == doctest::Approx(0.5).epsilon(1e-12));
    }
}

TEST_CASE("dataset metrics") {
    SUBCASE("empty dataset is rejected") {
        CHECK_THROWS_AS(dataset_metrics({}), std::invalid_argument);
    }
    SUBCASE("perfect detector scores ones") {
        Image prob(6, 6, 0.0);
        BinaryMap gt(6, 6);
        for (int i = 0; i < 6; ++i) {
            prob.at(i, 2) = 1.0;
            gt.at(i, 2) = 1;
        }
        const auto curve = pr_curve(prob, gt, default_threshold_grid(), 2.0);
        const DatasetMetrics m = dataset_metrics({curve});
        CHECK(m.ods == 1.0);
        CHECK(m.ois == 1.0);
        CHECK(m.ap == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("per-image best thresholds beat the shared one (OIS > ODS)") {
        // Image A is perfect only at t in (0.2, 0.28); image B only at
        // t in (0.6, 0.68). No shared threshold is perfect for both.
        Image pa(8, 8, 0.0);
        BinaryMap ga(8, 8);
        pa.at(1, 1) = 0.3;
        ga.at(1, 1) = 1;
        pa.at(5, 5) = 0.28;
        ga.at(5, 5) = 1;
        pa.at(3, 6) = 0.2;  // false alarm below A's sweet spot
        Image pb(8, 8, 0.0);
        BinaryMap gb(8, 8);
        pb.at(2, 2) = 0.7;
        gb.at(2, 2) = 1;
        pb.at(6, 1) = 0.68;
        gb.at(6, 1) = 1;
        pb.at(4, 4) = 0.6;  // false alarm below B's sweet spot
        const auto grid = default_threshold_grid();
        const DatasetMetrics m = dataset_metrics(
            {pr_curve(pa, ga, grid, 0.5), pr_curve(pb, gb, grid, 0.5)});
        CHECK(m.ois == 1.0);
        CHECK(m.ods < m.ois);
    }
    SUBCASE("ODS <= OIS over randomized fixtures") {
        std::mt19937_64 rng(2025);
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        const auto grid = default_threshold_grid();
        for (int trial = 0; trial < 100; ++trial) {
            std::vector<std::vector<PRPoint>> curves;
            const int n_img = 2 + static_cast<int>(uni(rng) * 3);
            for (int i = 0; i < n_img; ++i) {
                Image prob(8, 8);
                for (double& v : prob.data) v = uni(rng);
                BinaryMap gt(8, 8);
                for (auto& b : gt.bits) b = uni(rng) < 0.2 ? 1 : 0;
                curves.push_back(pr_curve(prob, gt, grid, 2.0));
            }
            const DatasetMetrics m = dataset_metrics(curves);
            CHECK(m.ods <= m.ois + 1e-12);
        }
    }
    SUBCASE("AP is one exactly when precision one meets recall one") {
        Image prob(6, 6, 0.0);
        BinaryMap gt(6, 6);
        prob.at(2, 2) = 0.8;
        gt.at(2, 2) = 1;
        const auto grid = default_threshold_grid();
        CHECK(dataset_metrics({pr_curve(prob, gt, grid, 1.0)}).ap ==
              doctest::Approx(1.0).epsilon(1e-12));
        prob.at(5, 5) = 0.9;  // persistent false alarm: precision < 1 at recall 1
        const DatasetMetrics m = dataset_metrics({pr_curve(prob, gt, grid, 1.0)});
        CHECK(m.ap < 1.0);
        CHECK(m.ap >= 0.0);
    }
}
