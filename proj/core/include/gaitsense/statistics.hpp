#pragma once

#include <array>
#include <span>
#include <string_view>

namespace gaitsense {

inline constexpr std::size_t kStatCount = 12;
inline constexpr std::size_t kSeriesEntropyBins = 16;
inline constexpr double kPeakProminence = 0.05;

// Max, Min, Range, Median, Mean, SD, CV, Entropy, Peaks, Valleys, Skewness,
// Kurtosis. Shared by the per-step and the whole-test statistics.
const std::array<std::string_view, kStatCount>& statistic_names();

namespace stat {
inline constexpr std::size_t kMax = 0;
inline constexpr std::size_t kMin = 1;
inline constexpr std::size_t kRange = 2;
inline constexpr std::size_t kMedian = 3;
inline constexpr std::size_t kMean = 4;
inline constexpr std::size_t kSD = 5;
inline constexpr std::size_t kCV = 6;
inline constexpr std::size_t kEntropy = 7;
inline constexpr std::size_t kPeaks = 8;
inline constexpr std::size_t kValleys = 9;
inline constexpr std::size_t kSkewness = 10;
inline constexpr std::size_t kKurtosis = 11;
}  // namespace stat

using SeriesStatistics = std::array<double, kStatCount>;

// Population SD; CV = SD / mean (0 when mean is 0); entropy over a 16-bin
// histogram; skewness and kurtosis are 0 when SD is 0. Requires >= 2 values.
SeriesStatistics series_statistics(std::span<const double> series);

// Strict local maxima whose prominence is at least `fraction` of the series
// range.
std::size_t count_peaks(std::span<const double> series, double fraction = kPeakProminence);
std::size_t count_valleys(std::span<const double> series, double fraction = kPeakProminence);

double median(std::span<const double> values);

}  // namespace gaitsense
