#include "gaitsense/preprocess.hpp"

#include <algorithm>
#include <cmath>

#include "gaitsense/error.hpp"

namespace gaitsense {

Grid::Grid(std::size_t width, std::size_t height, std::vector<double> data)
    : width_(width), height_(height), data_(std::move(data)) {
    if (data_.size() != width_ * height_) {
        throw DimensionError("grid data has " + std::to_string(data_.size()) + " values, expected " +
                             std::to_string(width_ * height_));
    }
}

namespace {

std::array<double, 5> gaussian_1d() {
    std::array<double, 5> w{};
    double sum = 0.0;
    for (int k = -2; k <= 2; ++k) {
        w[k + 2] = std::exp(-(k * k) / (2.0 * kGaussianSigma * kGaussianSigma));
        sum += w[k + 2];
    }
    for (auto& v : w) v /= sum;
    return w;
}

const std::array<double, 5>& weights_1d() {
    static const auto w = gaussian_1d();
    return w;
}

}  // namespace

Grid raw_grid(std::span<const double> pressure) {
    if (pressure.size() != kRawPixels) {
        throw DimensionError("raw pressure must have 16x25 = 400 values, got " + std::to_string(pressure.size()));
    }
    return Grid(kRawWidth, kRawHeight, std::vector<double>(pressure.begin(), pressure.end()));
}

Grid upsample_bilinear(const Grid& raw) {
    if (raw.width() != kRawWidth || raw.height() != kRawHeight) {
        throw DimensionError("upsampling expects a 16x25 image, got " + std::to_string(raw.width()) + "x" +
                             std::to_string(raw.height()));
    }
    Grid out(kImageWidth, kImageHeight);
    const double sx = static_cast<double>(kRawWidth - 1) / static_cast<double>(kImageWidth - 1);
    const double sy = static_cast<double>(kRawHeight - 1) / static_cast<double>(kImageHeight - 1);

    for (std::size_t y = 0; y < kImageHeight; ++y) {
        const double fy = static_cast<double>(y) * sy;
        const auto y0 = std::min(static_cast<std::size_t>(fy), kRawHeight - 2);
        const double wy = fy - static_cast<double>(y0);
        for (std::size_t x = 0; x < kImageWidth; ++x) {
            const double fx = static_cast<double>(x) * sx;
            const auto x0 = std::min(static_cast<std::size_t>(fx), kRawWidth - 2);
            const double wx = fx - static_cast<double>(x0);
            const double top = raw.at(x0, y0) * (1.0 - wx) + raw.at(x0 + 1, y0) * wx;
            const double bottom = raw.at(x0, y0 + 1) * (1.0 - wx) + raw.at(x0 + 1, y0 + 1) * wx;
            out.at(x, y) = top * (1.0 - wy) + bottom * wy;
        }
    }
    return out;
}

const std::array<std::array<double, 5>, 5>& gaussian_kernel() {
    static const auto kernel = [] {
        const auto& w = weights_1d();
        std::array<std::array<double, 5>, 5> k{};
        for (std::size_t i = 0; i < 5; ++i)
            for (std::size_t j = 0; j < 5; ++j) k[i][j] = w[i] * w[j];
        return k;
    }();
    return kernel;
}

// The 2-D Gaussian factors into a row pass and a column pass.
Grid gaussian_smooth(const Grid& image) {
    if (image.width() != kImageWidth || image.height() != kImageHeight) {
        throw DimensionError("smoothing expects a 32x100 image");
    }
    const auto& w = weights_1d();
    const auto width = static_cast<std::ptrdiff_t>(image.width());
    const auto height = static_cast<std::ptrdiff_t>(image.height());
    auto clamp = [](std::ptrdiff_t v, std::ptrdiff_t hi) { return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(v, 0, hi - 1)); };

    Grid rows(image.width(), image.height());
    for (std::ptrdiff_t y = 0; y < height; ++y) {
        for (std::ptrdiff_t x = 0; x < width; ++x) {
            double acc = 0.0;
            for (std::ptrdiff_t k = -2; k <= 2; ++k) acc += w[k + 2] * image.at(clamp(x + k, width), static_cast<std::size_t>(y));
            rows.at(static_cast<std::size_t>(x), static_cast<std::size_t>(y)) = acc;
        }
    }
    Grid out(image.width(), image.height());
    for (std::ptrdiff_t y = 0; y < height; ++y) {
        for (std::ptrdiff_t x = 0; x < width; ++x) {
            double acc = 0.0;
            for (std::ptrdiff_t k = -2; k <= 2; ++k) acc += w[k + 2] * rows.at(static_cast<std::size_t>(x), clamp(y + k, height));
            out.at(static_cast<std::size_t>(x), static_cast<std::size_t>(y)) = acc;
        }
    }
    return out;
}

ProcessedFrame preprocess(const ShoeSample& sample) {
    return {sample.t_index, gaussian_smooth(upsample_bilinear(raw_grid(sample.pressure))), sample.fore_imu,
            sample.hind_imu};
}

std::vector<ProcessedFrame> preprocess(const SampleStream& stream) {
    std::vector<ProcessedFrame> frames;
    frames.reserve(stream.size());
    for (const auto& s : stream) frames.push_back(preprocess(s));
    return frames;
}

}  // namespace gaitsense
