#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "gaitsense/grid.hpp"
#include "gaitsense/preprocess.hpp"

namespace gaitsense {

inline constexpr std::size_t kFrameFeatureCount = 40;
inline constexpr std::size_t kBiomechCount = 9;
inline constexpr std::size_t kImageFeatureCount = 15;
inline constexpr std::size_t kImuFeatureCount = 16;
inline constexpr std::size_t kImageEntropyBins = 64;

// Zero-based positions of the frame features used by other modules
// (Fdes_n lives at index n - 1).
namespace fdes {
inline constexpr std::size_t kTotalForce = 0;
inline constexpr std::size_t kArea = 1;
inline constexpr std::size_t kAvgPressure = 2;
inline constexpr std::size_t kCentreX = 3;
inline constexpr std::size_t kCentreY = 4;
inline constexpr std::size_t kCentreSpeedX = 5;
inline constexpr std::size_t kCentreSpeedY = 6;
inline constexpr std::size_t kCentreSpeed = 7;
inline constexpr std::size_t kCentreDirection = 8;
inline constexpr std::size_t kImageMax = 9;
inline constexpr std::size_t kImageMin = 10;
inline constexpr std::size_t kImageRange = 11;
inline constexpr std::size_t kImageMedian = 12;
inline constexpr std::size_t kImageMean = 13;
inline constexpr std::size_t kImageSD = 14;
inline constexpr std::size_t kImageCV = 15;
inline constexpr std::size_t kImageEntropy = 16;
inline constexpr std::size_t kImageHu1 = 17;
inline constexpr std::size_t kForeAccX = 24;
inline constexpr std::size_t kForeAccXyz = 27;
inline constexpr std::size_t kForeGyroX = 28;
inline constexpr std::size_t kForeGyroXyz = 31;
inline constexpr std::size_t kBackAccX = 32;
inline constexpr std::size_t kBackAccXyz = 35;
inline constexpr std::size_t kBackGyroX = 36;
inline constexpr std::size_t kBackGyroXyz = 39;
}  // namespace fdes

// Signal names without the foot prefix, e.g. "ImageMax", "ForeGyroY".
const std::array<std::string_view, kFrameFeatureCount>& frame_feature_names();

struct FrameFeatureRow {
    std::int64_t t_index = 0;
    std::array<double, kFrameFeatureCount> values{};
};

// 0.7 * mean + 0.3 * min over every pixel of every frame.
double area_threshold(std::span<const ProcessedFrame> frames);

// Fdes_1..Fdes_9. `prev` is the previous frame's row of the same stream, or
// null for the first frame.
std::array<double, kBiomechCount> biomech_features(const Grid& image, const FrameFeatureRow* prev, double delta);

// Fdes_10..Fdes_24.
std::array<double, kImageFeatureCount> image_features(const Grid& image);

// Seven Hu invariants of the mass-normalized image (Fdes_18..Fdes_24).
std::array<double, 7> hu_moments(const Grid& image);

// Shannon entropy (bits) of a `bins`-bin histogram over [min, max] of values.
double histogram_entropy(std::span<const double> values, std::size_t bins);

// Fdes_25..Fdes_40.
std::array<double, kImuFeatureCount> imu_features(const ImuReading& fore, const ImuReading& hind);

std::vector<FrameFeatureRow> frame_features(std::span<const ProcessedFrame> frames);

// Column view: series[i][t] = Fdes_{i+1} at frame t.
using FeatureSeries = std::array<std::vector<double>, kFrameFeatureCount>;
FeatureSeries to_series(std::span<const FrameFeatureRow> rows);

}  // namespace gaitsense
