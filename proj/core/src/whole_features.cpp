#include "gaitsense/whole_features.hpp"

#include <algorithm>
#include <cmath>

#include "gaitsense/error.hpp"

namespace gaitsense {

namespace {

// Appends the 12 statistic names to `base` and pushes them.
void push_stat_names(std::vector<std::string>& names, const std::string& base) {
    for (auto s : statistic_names()) names.push_back(base + "_" + std::string(s));
}

std::string foot_prefix(Foot foot) { return std::string(1, foot_letter(foot)); }

std::vector<std::string> build_names() {
    std::vector<std::string> names;
    const auto& frame = frame_feature_names();
    const auto& stats = statistic_names();
    const auto& phases = phase_feature_names();
    for (Foot foot : {Foot::Left, Foot::Right}) {
        const auto f = foot_prefix(foot);
        for (auto p : phases) push_stat_names(names, f + "Phase" + std::string(p));
        for (auto fi : frame)
            for (auto s1 : stats) push_stat_names(names, f + std::string(fi) + "_" + std::string(s1));
        const std::size_t offset = foot == Foot::Left ? 0 : kFrameFeatureCount;
        for (std::size_t li = 0; li < kFrameFeatureCount; ++li) {
            const std::size_t bi = offset + li;
            for (auto mode : {"_MaxTime_", "_MinTime_"}) {
                for (std::size_t j = 0; j < kBilateralCount; ++j) {
                    if (j == bi) continue;
                    push_stat_names(names, bilateral_name(bi) + mode + bilateral_name(j));
                }
            }
        }
    }
    for (auto p : phases) push_stat_names(names, "Phase" + std::string(p));
    for (auto fi : frame)
        for (auto s1 : stats) push_stat_names(names, std::string(fi) + "_" + std::string(s1));
    const std::size_t sym_begin = names.size() - (phases.size() + frame.size() * stats.size()) * stats.size();
    for (std::size_t i = sym_begin; i < names.size(); ++i) names[i] += "_Symmetry";
    return names;
}

constexpr std::size_t kPerFootPaired = (kPhaseFeatureCount + kFrameFeatureCount * kStatCount) * kStatCount;
constexpr std::size_t kPerFoot = kPerFootPaired + kFusionPerFoot * kStatCount;

void append_stats(std::vector<double>& out, std::span<const double> series) {
    const auto s = whole_statistics(series);
    out.insert(out.end(), s.begin(), s.end());
}

void append_foot(std::vector<double>& out, const FootStepFeatures& foot) {
    const auto& steps = foot.steps;
    if (steps.size() < 2) {
        throw DegenerateInputError(std::string("foot ") + foot_letter(foot.foot) + " has " +
                                   std::to_string(steps.size()) + " usable steps, need 2");
    }
    std::vector<double> series;
    series.reserve(steps.size());
    for (std::size_t p = 0; p < kPhaseFeatureCount; ++p) {
        series.clear();
        for (const auto& st : steps) {
            if (p < 7) {
                series.push_back(st.phase.spd[p]);
            } else if (st.phase.ds_to_next) {
                series.push_back(*st.phase.ds_to_next);
            }
        }
        // Two usable steps leave a single Spd_8 value: a constant series.
        if (series.size() == 1) series.push_back(series.front());
        append_stats(out, series);
    }
    for (std::size_t i = 0; i < kFrameFeatureCount; ++i) {
        for (std::size_t s1 = 0; s1 < kStatCount; ++s1) {
            series.clear();
            for (const auto& st : steps) series.push_back(st.stats[i][s1]);
            append_stats(out, series);
        }
    }
    for (std::size_t slot = 0; slot < kFusionPerFoot; ++slot) {
        series.clear();
        for (const auto& st : steps) series.push_back(st.fusion[slot]);
        append_stats(out, series);
    }
}

}  // namespace

SeriesStatistics whole_statistics(std::span<const double> step_series) {
    if (step_series.size() < 2) throw DegenerateInputError("whole statistics need at least 2 steps");
    return series_statistics(step_series);
}

double symmetry(double left, double right) {
    const double l = std::abs(left), r = std::abs(right);
    const double hi = std::max(l, r);
    if (hi == 0.0) return 0.0;
    return 1.0 - std::min(l, r) / hi;
}

const std::vector<std::string>& whole_feature_names() {
    static const std::vector<std::string> names = build_names();
    return names;
}

std::vector<double> whole_features(const FootStepFeatures& left, const FootStepFeatures& right) {
    std::vector<double> out;
    out.reserve(whole_feature_names().size());
    append_foot(out, left);
    append_foot(out, right);
    for (std::size_t k = 0; k < kPerFootPaired; ++k) out.push_back(symmetry(out[k], out[kPerFoot + k]));
    return out;
}

FeatureModality feature_modality(std::string_view name) {
    FeatureModality m;
    m.fusion = name.find("Time_") != std::string_view::npos;
    m.imu = name.find("Fore") != std::string_view::npos || name.find("Back") != std::string_view::npos;
    m.pressure = name.find("Mat") != std::string_view::npos || name.find("Image") != std::string_view::npos ||
                 name.find("Phase") != std::string_view::npos;
    return m;
}

ZScore ZScore::fit(const Matrix& fit) {
    if (fit.rows() == 0) throw DegenerateInputError("z-score needs at least one fit row");
    ZScore z;
    z.mean_.resize(fit.cols());
    z.sd_.resize(fit.cols());
    const double n = static_cast<double>(fit.rows());
    for (std::size_t c = 0; c < fit.cols(); ++c) {
        const auto col = fit.column(c);
        double sum = 0.0;
        for (double v : col) sum += v;
        const double mean = sum / n;
        double ss = 0.0;
        bool constant = true;
        for (double v : col) {
            ss += (v - mean) * (v - mean);
            constant = constant && v == col[0];
        }
        z.mean_[c] = mean;
        z.sd_[c] = constant ? 0.0 : std::sqrt(ss / n);
    }
    return z;
}

Matrix ZScore::apply(const Matrix& m) const {
    if (m.cols() != mean_.size()) throw DimensionError("z-score applied to a matrix of different width");
    Matrix out(m.rows(), m.cols());
    for (std::size_t c = 0; c < m.cols(); ++c) {
        const auto src = m.column(c);
        auto dst = out.column(c);
        if (sd_[c] == 0.0) continue;
        for (std::size_t r = 0; r < m.rows(); ++r) dst[r] = (src[r] - mean_[c]) / sd_[c];
    }
    return out;
}

std::vector<double> ZScore::apply_row(std::span<const double> row, std::span<const std::size_t> cols) const {
    std::vector<double> out(cols.size());
    for (std::size_t i = 0; i < cols.size(); ++i) {
        const auto c = cols[i];
        out[i] = sd_[c] == 0.0 ? 0.0 : (row[i] - mean_[c]) / sd_[c];
    }
    return out;
}

std::size_t ZScore::constant_count() const {
    return static_cast<std::size_t>(std::count(sd_.begin(), sd_.end(), 0.0));
}

}  // namespace gaitsense
