#include <doctest.h>

#include <algorithm>
#include <cmath>

#include <numeric>

#include "gaitsense/error.hpp"
#include "gaitsense/preprocess.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace gaitsense;

TEST_CASE("bilinear upsampling matches a tent-weight oracle") {
    testgen::Engine e(5);
    for (int trial = 0; trial < 5; ++trial) {
        Grid raw(kRawWidth, kRawHeight);
        for (auto& v : raw.values()) v = testgen::uniform(e, 0, 255);
        const auto up = upsample_bilinear(raw);
        REQUIRE(up.width() == kImageWidth);
        REQUIRE(up.height() == kImageHeight);
        for (std::size_t y = 0; y < kImageHeight; ++y)
            for (std::size_t x = 0; x < kImageWidth; ++x)
                CHECK(oracle::close(up.at(x, y), oracle::bilinear_pixel(raw, kImageWidth, kImageHeight, x, y), 1e-12));
    }
}

TEST_CASE("bilinear upsampling keeps constants and linear ramps") {
    Grid c(kRawWidth, kRawHeight, 7.25);
    const auto up = upsample_bilinear(c);
    for (double v : up.values()) CHECK(v == doctest::Approx(7.25).epsilon(1e-15));

    Grid ramp(kRawWidth, kRawHeight);
    for (std::size_t y = 0; y < kRawHeight; ++y)
        for (std::size_t x = 0; x < kRawWidth; ++x) ramp.at(x, y) = 3.0 * static_cast<double>(x);
    const auto r = upsample_bilinear(ramp);
    const double step = 3.0 * 15.0 / 31.0;
    for (std::size_t y = 0; y < kImageHeight; y += 9)
        for (std::size_t x = 0; x < kImageWidth; ++x)
            CHECK(r.at(x, y) == doctest::Approx(step * static_cast<double>(x)).epsilon(1e-12));
}

TEST_CASE("hot pixel spreads to the mapped location") {
    Grid raw(kRawWidth, kRawHeight);
    raw.at(5, 12) = 100.0;
    const auto up = upsample_bilinear(raw);
    const auto it = std::max_element(up.values().begin(), up.values().end());
    const auto pos = static_cast<std::size_t>(it - up.values().begin());
    const double ux = static_cast<double>(pos % kImageWidth) * 15.0 / 31.0;
    const double uy = static_cast<double>(pos / kImageWidth) * 24.0 / 99.0;
    CHECK(std::abs(ux - 5.0) < 1.0);
    CHECK(std::abs(uy - 12.0) < 1.0);
    CHECK(*std::min_element(up.values().begin(), up.values().end()) >= 0.0);
    CHECK(*it <= 100.0);
}

TEST_CASE("upsampling rejects other shapes") {
    CHECK_THROWS_AS(upsample_bilinear(Grid(16, 24)), DimensionError);
    CHECK_THROWS_AS(raw_grid(std::vector<double>(399, 0.0)), DimensionError);
    CHECK_THROWS_AS(gaussian_smooth(Grid(31, 100)), DimensionError);
}

TEST_CASE("Gaussian kernel is normalized and matches the direct convolution oracle") {
    double sum = 0.0;
    for (const auto& row : gaussian_kernel())
        for (double w : row) sum += w;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-15));

    testgen::Engine e(9);
    const auto img = testgen::blob_image(e, kImageWidth, kImageHeight);
    const auto out = gaussian_smooth(img);
    for (std::size_t y = 0; y < kImageHeight; ++y)
        for (std::size_t x = 0; x < kImageWidth; ++x)
            CHECK(oracle::close(out.at(x, y), oracle::gaussian_pixel(img, x, y), 1e-12));
}

TEST_CASE("smoothing preserves constants, interior mass and the impulse response") {
    const auto c = gaussian_smooth(Grid(kImageWidth, kImageHeight, 4.0));
    for (double v : c.values()) CHECK(v == doctest::Approx(4.0).epsilon(1e-14));

    testgen::Engine e(2);
    const auto blob = testgen::blob_image(e, kImageWidth, kImageHeight, 3);
    const auto s = gaussian_smooth(blob);
    const double before = std::accumulate(blob.values().begin(), blob.values().end(), 0.0);
    const double after = std::accumulate(s.values().begin(), s.values().end(), 0.0);
    CHECK(after == doctest::Approx(before).epsilon(1e-9));
    CHECK(*std::max_element(s.values().begin(), s.values().end()) <=
          *std::max_element(blob.values().begin(), blob.values().end()));

    Grid impulse(kImageWidth, kImageHeight);
    impulse.at(16, 50) = 1.0;
    const auto k = gaussian_smooth(impulse);
    const auto& w = gaussian_kernel();
    for (int dy = -2; dy <= 2; ++dy)
        for (int dx = -2; dx <= 2; ++dx)
            CHECK(k.at(static_cast<std::size_t>(16 + dx), static_cast<std::size_t>(50 + dy)) ==
                  doctest::Approx(w[static_cast<std::size_t>(dy + 2)][static_cast<std::size_t>(dx + 2)]).epsilon(1e-14));
}

TEST_CASE("preprocessing a sample is deterministic") {
    ShoeSample s;
    s.t_index = 4;
    testgen::Engine e(1);
    for (std::size_t i = 0; i < kRawPixels; ++i) s.pressure.push_back(testgen::uniform(e, 0, 200));
    const auto a = preprocess(s), b = preprocess(s);
    CHECK(a.pressure == b.pressure);
    CHECK(a.t_index == 4);
    for (double v : a.pressure.values()) CHECK(v >= 0.0);
}
