#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "gaitsense/grid.hpp"
#include "gaitsense/recording.hpp"

namespace gaitsense {

inline constexpr std::size_t kImageWidth = 32;
inline constexpr std::size_t kImageHeight = 100;
inline constexpr std::size_t kImagePixels = kImageWidth * kImageHeight;
inline constexpr double kGaussianSigma = 1.0;

struct ProcessedFrame {
    std::int64_t t_index = 0;
    Grid pressure;  // 32 x 100
    ImuReading fore_imu;
    ImuReading hind_imu;
};

// Wraps a raw 400-value sample into a 16 x 25 grid.
Grid raw_grid(std::span<const double> pressure);

// Align-corners bilinear resampling to 32 x 100.
Grid upsample_bilinear(const Grid& raw);

// Normalized 5 x 5 Gaussian weights, sigma 1, indexed [dy + 2][dx + 2].
const std::array<std::array<double, 5>, 5>& gaussian_kernel();

// 5 x 5 Gaussian blur with edge replication.
Grid gaussian_smooth(const Grid& image);

ProcessedFrame preprocess(const ShoeSample& sample);
std::vector<ProcessedFrame> preprocess(const SampleStream& stream);

}  // namespace gaitsense
