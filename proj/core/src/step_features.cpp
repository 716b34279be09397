#include "gaitsense/step_features.hpp"

#include "gaitsense/error.hpp"

namespace gaitsense {

namespace {

constexpr std::array<std::string_view, kPhaseFeatureCount> kPhaseNames = {
    "Cycle", "Stance", "Swing", "DoubleSupport", "StanceRatio", "SwingRatio", "DSPrevStanceRatio", "DSNextStanceRatio",
};

double seconds(std::size_t frames) { return static_cast<double>(frames) / static_cast<double>(kSampleRate); }

}  // namespace

const std::array<std::string_view, kPhaseFeatureCount>& phase_feature_names() { return kPhaseNames; }

PhaseDurations phase_durations(const StepSpan& step, const StepSpan* next_step) {
    if (step.stance_frames() == 0 || step.cycle_frames() == 0) {
        throw DegenerateInputError("step " + std::to_string(step.k) + " has no stance phase");
    }
    PhaseDurations d;
    d.spd[0] = seconds(step.cycle_frames());
    d.spd[1] = seconds(step.stance_frames());
    d.spd[2] = seconds(step.swing_frames());
    d.spd[3] = seconds(step.double_support_frames());
    d.spd[4] = d.spd[1] / d.spd[0];
    d.spd[5] = d.spd[2] / d.spd[0];
    d.spd[6] = d.spd[3] / d.spd[1];
    if (next_step && next_step->stance_frames() > 0) d.ds_to_next = d.spd[3] / seconds(next_step->stance_frames());
    return d;
}

std::size_t extremum_frame(std::span<const double> series, FrameWindow window, Extremum mode) {
    if (window.length() == 0 || window.end > series.size()) throw DomainError("empty or out-of-range step window");
    std::size_t best = window.begin;
    for (std::size_t t = window.begin + 1; t < window.end; ++t) {
        const bool better = mode == Extremum::Max ? series[t] > series[best] : series[t] < series[best];
        if (better) best = t;
    }
    return best;
}

double fusion_feature(const BilateralSeries& features, std::size_t i, std::size_t j, Extremum mode,
                      FrameWindow window) {
    if (i == j) throw DomainError("fusion feature needs two distinct frame features");
    if (i >= kBilateralCount || j >= kBilateralCount) throw DomainError("fusion feature index out of range");
    return features[j][extremum_frame(features[i], window, mode)];
}

std::string bilateral_name(std::size_t i) {
    const bool left = i < kFrameFeatureCount;
    return std::string(1, left ? 'L' : 'R') + std::string(frame_feature_names()[left ? i : i - kFrameFeatureCount]);
}

std::size_t fusion_slot(std::size_t local_i, std::size_t bilateral_i, std::size_t j, Extremum mode) {
    const std::size_t jj = j < bilateral_i ? j : j - 1;
    return local_i * kFusionPerIndex + (mode == Extremum::Max ? 0 : kBilateralCount - 1) + jj;
}

FootStepFeatures step_features(Foot foot, std::span<const StepSpan> steps, const BilateralSeries& features) {
    FootStepFeatures out;
    out.foot = foot;
    const std::size_t offset = foot == Foot::Left ? 0 : kFrameFeatureCount;

    for (std::size_t s = 0; s < steps.size(); ++s) {
        const StepSpan& step = steps[s];
        const FrameWindow window{step.start_t, step.end_t};
        if (window.length() < 2) {
            out.warnings.push_back("step " + std::to_string(step.k) + " shorter than 2 frames, excluded");
            continue;
        }
        StepFeatureRow row;
        row.k = step.k;
        try {
            row.phase = phase_durations(step, s + 1 < steps.size() ? &steps[s + 1] : nullptr);
        } catch (const DegenerateInputError& e) {
            out.warnings.push_back(std::string(e.what()) + ", excluded");
            continue;
        }
        for (std::size_t i = 0; i < kFrameFeatureCount; ++i) {
            row.stats[i] = step_statistics(features[offset + i].subspan(window.begin, window.length()));
        }

        row.fusion.resize(kFusionPerFoot);
        for (std::size_t li = 0; li < kFrameFeatureCount; ++li) {
            const std::size_t bi = offset + li;
            const auto series_i = features[bi];
            const std::size_t at_max = extremum_frame(series_i, window, Extremum::Max);
            const std::size_t at_min = extremum_frame(series_i, window, Extremum::Min);
            for (std::size_t j = 0; j < kBilateralCount; ++j) {
                if (j == bi) continue;
                const auto series_j = features[j];
                row.fusion[fusion_slot(li, bi, j, Extremum::Max)] = series_j[at_max];
                row.fusion[fusion_slot(li, bi, j, Extremum::Min)] = series_j[at_min];
            }
        }
        out.steps.push_back(std::move(row));
    }
    return out;
}

}  // namespace gaitsense
