#include <doctest.h>

#include <cmath>

#include "fdif/direction.hpp"
#include "fdif/fdif.hpp"
#include "fixtures.hpp"

using namespace fdif;

namespace {

FractalMap uniform_map(int w, int h, double d) {
    return FractalMap{Image(w, h, d), Image(w, h, 0.0)};
}

}  // namespace

TEST_CASE("fd preserving transform") {
    SUBCASE("shape mismatch is rejected") {
        CHECK_THROWS_AS(fd_preserving_transform(Image(5, 5, 0.1), uniform_map(5, 4, 2.0),
                                                uniform_map(5, 5, 1.0), 9),
                        std::invalid_argument);
    }
    SUBCASE("alpha = 1 reduces to rectification") {
        Image img = fixtures::random_image(12, 12, 5, -0.2, 1.0);
        const Image out =
            fd_preserving_transform(img, uniform_map(12, 12, 1.7), uniform_map(12, 12, 1.7), 9);
        for (size_t i = 0; i < img.data.size(); ++i)
            CHECK(out.data[i] ==
                  doctest::Approx(std::max(img.data[i], 0.0)).epsilon(1e-12));
    }
    SUBCASE("constants are fixed points for any alpha") {
        for (double a : {0.5, 1.0, 2.0, 3.5}) {
            const Image out = fd_preserving_transform_fixed(Image(13, 13, 0.42), a, 9);
            for (double v : out.data) CHECK(v == doctest::Approx(0.42).epsilon(1e-9));
        }
    }
    SUBCASE("alpha = 2 sharpens a bright line on a dim background") {
        Image img(9, 9, 0.2);
        for (int x = 0; x < 9; ++x) img.at(x, 4) = 0.8;
        const Image out = fd_preserving_transform_fixed(img, 2.0, 9);
        const double in_contrast = img.at(4, 4) / img.at(4, 0);
        const double out_contrast = out.at(4, 4) / out.at(4, 0);
        CHECK(out_contrast > in_contrast);
    }
    SUBCASE("alpha clamping keeps wild dimension ratios bounded") {
        Image img = fixtures::random_image(10, 10, 6);
        FractalMap dorig = uniform_map(10, 10, 2.0);
        FractalMap dfilt = uniform_map(10, 10, 1e-9);  // ratio would explode
        const Image out = fd_preserving_transform(img, dorig, dfilt, 9);
        for (double v : out.data) CHECK(std::isfinite(v));
    }
}

TEST_CASE("fdif iterate") {
    SUBCASE("config validation") {
        FdifConfig cfg;
        cfg.iterations = 0;
        CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
        cfg = FdifConfig{};
        cfg.kernel_side = 8;
        CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
        cfg = FdifConfig{};
        cfg.forced_alpha = 9.0;
        CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    }
    SUBCASE("constants are fixed points across iterations") {
        FdifConfig cfg;
        cfg.iterations = 3;
        const Image out = fdif_iterate(Image(24, 24, 0.37), cfg);
        for (double v : out.data) CHECK(std::abs(v - 0.37) <= 1e-6);
    }
    SUBCASE("output stays within [0,1]") {
        const auto fx = fixtures::buried_curves(48, 21, 0.1, 0.6, 0.3, 0.5, 2);
        FdifConfig cfg;
        cfg.iterations = 2;
        const Image out = fdif_iterate(fx.image, cfg);
        for (double v : out.data) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    }
    SUBCASE("two runs are bit-identical") {
        const auto fx = fixtures::buried_curves(40, 5, 0.1, 0.5, 0.3, 0.5, 2);
        FdifConfig cfg;
        cfg.iterations = 2;
        const Image a = fdif_iterate(fx.image, cfg);
        const Image b = fdif_iterate(fx.image, cfg);
        CHECK(a.data == b.data);
    }
    SUBCASE("curves hidden in noise become more separable per iteration") {
        // Curve pixels stay brighter than the background, and the best
        // threshold F1 separating them grows with the iteration count.
        const auto fx = fixtures::buried_curves(96, 7, 0.1, 0.7, 0.25, 0.6, 3);
        double prev = fixtures::separability_f1(fx.image, fx.gt);
        for (int iters = 1; iters <= 3; ++iters) {
            FdifConfig cfg;
            cfg.iterations = iters;
            const Image out = fdif_iterate(fx.image, cfg);
            CHECK(fixtures::mean_over(out, fx.gt, true) >
                  fixtures::mean_over(out, fx.gt, false));
            const double f1 = fixtures::separability_f1(out, fx.gt);
            CHECK(f1 > prev);
            prev = f1;
        }
    }
    SUBCASE("one iteration approximately restores the pre-filter dimension") {
        const auto fx = fixtures::buried_curves(96, 7, 0.1, 0.7, 0.25, 0.6, 3);
        const FractalMap d0 = estimate_fractal(fx.image, 5);
        const DirectionField field = direction_field(fx.image, 9, 1.0);
        const Image filtered = adaptive_filter(fx.image, field, 9);
        const FractalMap df = estimate_fractal(filtered, 5);
        const Image restored =
            clip01(fd_preserving_transform(filtered, d0, df, 9));
        const FractalMap dt = estimate_fractal(restored, 5);
        const double d_mean = fixtures::mean_over(d0.dimension, fx.gt, true);
        const double dt_mean = fixtures::mean_over(dt.dimension, fx.gt, true);
        const double df_mean = fixtures::mean_over(df.dimension, fx.gt, true);
        CHECK(std::abs(dt_mean - d_mean) <= 0.3);
        // the transform never leaves the dimension farther off than filtering did
        CHECK(std::abs(dt_mean - d_mean) <= std::abs(df_mean - d_mean) + 0.05);
    }
}
