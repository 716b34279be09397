#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gaitsense/frame_features.hpp"
#include "gaitsense/recording.hpp"
#include "gaitsense/segmentation.hpp"
#include "gaitsense/statistics.hpp"

namespace gaitsense {

inline constexpr std::size_t kPhaseFeatureCount = 8;
inline constexpr std::size_t kBilateralCount = 2 * kFrameFeatureCount;
// Per indexing feature: Max and Min variants against the 79 other features.
inline constexpr std::size_t kFusionPerIndex = 2 * (kBilateralCount - 1);
inline constexpr std::size_t kFusionPerFoot = kFrameFeatureCount * kFusionPerIndex;

// "Cycle", "Stance", ... for Spd_1..Spd_8.
const std::array<std::string_view, kPhaseFeatureCount>& phase_feature_names();

struct PhaseDurations {
    std::array<double, 7> spd{};       // Spd_1..Spd_7
    std::optional<double> ds_to_next;  // Spd_8, absent on the last step
};

// Durations in seconds at the 60 Hz sample rate. Throws DegenerateInputError
// for a step without stance.
PhaseDurations phase_durations(const StepSpan& step, const StepSpan* next_step);

// Sst_1..Sst_12 over a frame-feature series restricted to one step.
inline SeriesStatistics step_statistics(std::span<const double> series) { return series_statistics(series); }

enum class Extremum { Max, Min };

// Bilateral frame features: index i < 40 is the left foot's Fdes_{i+1},
// i >= 40 the right foot's Fdes_{i-39}.
struct BilateralSeries {
    const FeatureSeries* left = nullptr;
    const FeatureSeries* right = nullptr;

    std::span<const double> operator[](std::size_t i) const {
        return i < kFrameFeatureCount ? std::span<const double>((*left)[i])
                                      : std::span<const double>((*right)[i - kFrameFeatureCount]);
    }
};

// First frame in the window where series i attains its maximum or minimum.
std::size_t extremum_frame(std::span<const double> series, FrameWindow window, Extremum mode);

// Fdes_j sampled where Fdes_i peaks (Max) or bottoms out (Min) within the
// window. i == j is a DomainError.
double fusion_feature(const BilateralSeries& features, std::size_t i, std::size_t j, Extremum mode,
                      FrameWindow window);

// Bilateral feature name, e.g. "RForeGyroY".
std::string bilateral_name(std::size_t i);

struct StepFeatureRow {
    std::size_t k = 0;
    PhaseDurations phase;
    std::array<SeriesStatistics, kFrameFeatureCount> stats{};
    // Fusion values indexed by this foot's 40 features: for each i, the Max
    // variant against every j != i in bilateral order, then the Min variant.
    std::vector<double> fusion;
};

struct FootStepFeatures {
    Foot foot = Foot::Left;
    std::vector<StepFeatureRow> steps;
    std::vector<std::string> warnings;
};

// Step features of one foot. `steps` must already carry double-support
// windows; degenerate steps are dropped with a warning.
FootStepFeatures step_features(Foot foot, std::span<const StepSpan> steps, const BilateralSeries& features);

// Position of (i, j, mode) inside StepFeatureRow::fusion, where i is the
// foot-local feature index and j the bilateral index.
std::size_t fusion_slot(std::size_t local_i, std::size_t bilateral_i, std::size_t j, Extremum mode);

}  // namespace gaitsense
